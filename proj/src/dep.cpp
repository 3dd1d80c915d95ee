#include "sentinel/dep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sentinel/rng.hpp"
#include "sentinel/stats.hpp"

namespace sentinel {

namespace {

constexpr std::size_t kMaxPairs = 100;
constexpr std::size_t kMaxLag = 10;
constexpr std::size_t kForestTrees = 10;
constexpr int kForestDepth = 5;
constexpr std::size_t kForestLags = 3;
constexpr double kMinScale = 1e-12;
constexpr double kMissingTolerance = 0.20;

std::vector<double> finite_only(const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v)
        if (!is_missing(x)) out.push_back(x);
    return out;
}

double percentile_or(const std::vector<double>& v, double pct, double fallback) {
    auto f = finite_only(v);
    if (f.empty()) return fallback;
    const double p = stats::percentile(f, pct);
    return p > kMinScale ? p : fallback;
}

double mean_or(const std::vector<double>& v, double fallback) {
    auto f = finite_only(v);
    return f.empty() ? fallback : stats::mean(f);
}

/// Solve the normal equations X'X beta = X'y by Gaussian elimination with
/// partial pivoting; throws DegenerateRegressionError when singular.
std::vector<double> least_squares(const std::vector<std::vector<double>>& rows,
                                  const std::vector<double>& y) {
    const std::size_t n = rows.size();
    const std::size_t k = rows.front().size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t q = 0; q < k; ++q) a[p][q] += rows[i][p] * rows[i][q];
            a[p][k] += rows[i][p] * y[i];
        }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-10)
            throw DegenerateRegressionError("singular regression matrix");
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t q = col; q <= k; ++q) a[r][q] -= f * a[col][q];
        }
    }
    std::vector<double> beta(k);
    for (std::size_t i = 0; i < k; ++i) beta[i] = a[i][k] / a[i][i];
    return beta;
}

double residual_sum_of_squares(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& y,
                               const std::vector<double>& beta) {
    double rss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double pred = 0.0;
        for (std::size_t p = 0; p < beta.size(); ++p) pred += rows[i][p] * beta[p];
        const double e = y[i] - pred;
        rss += e * e;
    }
    return rss;
}

struct PairColumns {
    std::vector<double> a, b;
};

PairColumns pair_columns(const SeriesGrid& grid, const PairInfo& pair) {
    const std::size_t ca = grid.sensor_index(pair.a);
    const std::size_t cb = grid.sensor_index(pair.b);
    PairColumns out;
    out.a = grid.column(ca);
    out.b = grid.column(cb);
    return out;
}

/// Forest feature row (a_{t-1..t-3}, b_{t-1..t-3}); false when any lag or the
/// target is missing.
bool forest_features(const PairColumns& col, std::size_t t, std::vector<double>& f) {
    if (t < kForestLags) return false;
    for (std::size_t l = 1; l <= kForestLags; ++l) {
        const double av = col.a[t - l];
        const double bv = col.b[t - l];
        if (is_missing(av) || is_missing(bv)) return false;
        f[l - 1] = av;
        f[kForestLags + l - 1] = bv;
    }
    return true;
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& x;
    const std::vector<double>& y;
    std::vector<TreeNode> nodes;

    double node_mean(const std::vector<std::size_t>& idx) const {
        double s = 0.0;
        for (auto i : idx) s += y[i];
        return s / static_cast<double>(idx.size());
    }

    double node_sse(const std::vector<std::size_t>& idx) const {
        const double m = node_mean(idx);
        double s = 0.0;
        for (auto i : idx) {
            const double d = y[i] - m;
            s += d * d;
        }
        return s;
    }

    int build(std::vector<std::size_t> idx, int depth) {
        TreeNode node;
        node.value = node_mean(idx);
        const double sse = node_sse(idx);
        if (depth >= kForestDepth || idx.size() < 4 || sse < 1e-12) {
            nodes.push_back(node);
            return static_cast<int>(nodes.size()) - 1;
        }

        int best_feature = -1;
        double best_threshold = 0.0, best_score = sse;
        const std::size_t nf = x.front().size();
        for (std::size_t f = 0; f < nf; ++f) {
            std::vector<double> vals;
            vals.reserve(idx.size());
            for (auto i : idx) vals.push_back(x[i][f]);
            std::sort(vals.begin(), vals.end());
            // Up to 15 quantile candidates between distinct neighbours.
            for (std::size_t q = 1; q <= 15; ++q) {
                const std::size_t pos = q * vals.size() / 16;
                if (pos == 0 || pos >= vals.size()) continue;
                if (vals[pos] == vals[pos - 1]) continue;
                const double thr = 0.5 * (vals[pos] + vals[pos - 1]);
                double ls = 0.0, lm = 0.0, rs = 0.0, rm = 0.0;
                std::size_t ln = 0, rn = 0;
                for (auto i : idx) {
                    if (x[i][f] <= thr) {
                        lm += y[i];
                        ++ln;
                    } else {
                        rm += y[i];
                        ++rn;
                    }
                }
                if (ln == 0 || rn == 0) continue;
                lm /= static_cast<double>(ln);
                rm /= static_cast<double>(rn);
                for (auto i : idx) {
                    const double d = y[i] - (x[i][f] <= thr ? lm : rm);
                    (x[i][f] <= thr ? ls : rs) += d * d;
                }
                if (ls + rs < best_score - 1e-15) {
                    best_score = ls + rs;
                    best_feature = static_cast<int>(f);
                    best_threshold = thr;
                }
            }
        }
        if (best_feature < 0) {
            nodes.push_back(node);
            return static_cast<int>(nodes.size()) - 1;
        }

        std::vector<std::size_t> left, right;
        for (auto i : idx)
            (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
                .push_back(i);
        node.feature = best_feature;
        node.threshold = best_threshold;
        nodes.push_back(node);
        const int self = static_cast<int>(nodes.size()) - 1;
        nodes[self].left = build(std::move(left), depth + 1);
        nodes[self].right = build(std::move(right), depth + 1);
        return self;
    }
};

double tree_predict(const std::vector<TreeNode>& nodes, const std::vector<double>& f) {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(at)];
        at = f[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
}

double forest_predict(const PairForest& forest, const std::vector<double>& f) {
    double s = 0.0;
    for (const auto& t : forest.trees) s += tree_predict(t, f);
    return s / static_cast<double>(forest.trees.size());
}

/// Granger deviation sequence |residual|/scale for one pair; NaN where lags
/// are missing or the fit is invalid.
std::vector<double> granger_deviation(const PairColumns& col, const GrangerFit& g,
                                      std::size_t rows) {
    std::vector<double> out(rows, kMissing);
    if (!g.valid || g.resid_scale < kMinScale) return out;
    for (std::size_t t = g.lag; t < rows; ++t) {
        if (is_missing(col.b[t])) continue;
        double pred = g.unrestricted[0];
        bool ok = true;
        for (std::size_t l = 1; l <= g.lag; ++l) {
            const double bv = col.b[t - l];
            const double av = col.a[t - l];
            if (is_missing(bv) || is_missing(av)) {
                ok = false;
                break;
            }
            pred += g.unrestricted[l] * bv;
            pred += g.unrestricted[g.lag + l] * av;
        }
        if (!ok) continue;
        out[t] = std::fabs(col.b[t] - pred) / g.resid_scale;
    }
    return out;
}

}  // namespace

double information_criterion(double rss, std::size_t n, std::size_t k,
                             LagCriterion criterion) {
    const double nd = static_cast<double>(n);
    const double base = nd * std::log(std::max(rss, 1e-300) / nd);
    return criterion == LagCriterion::aic
               ? base + 2.0 * static_cast<double>(k)
               : base + static_cast<double>(k) * std::log(nd);
}

PairRegistry select_pairs(const SeriesGrid& train) {
    if (train.rows() < 100)
        throw TooShortError("pair selection needs at least 100 rows");

    struct Candidate {
        PairInfo info;
    };
    std::vector<Candidate> all;
    for (std::size_t i = 0; i < train.cols(); ++i) {
        for (std::size_t j = i + 1; j < train.cols(); ++j) {
            std::vector<double> a, b;
            for (std::size_t r = 0; r < train.rows(); ++r) {
                const double va = train.at(r, i);
                const double vb = train.at(r, j);
                if (is_missing(va) || is_missing(vb)) continue;
                a.push_back(va);
                b.push_back(vb);
            }
            if (a.size() < 100) continue;
            if (stats::variance(a) < kMinScale || stats::variance(b) < kMinScale) continue;
            PairInfo info;
            info.a = train.sensors[i].id;
            info.b = train.sensors[j].id;
            info.r = stats::pearson(a, b);
            info.p = stats::pearson_p_value(info.r, a.size());
            all.push_back({info});
        }
    }
    if (all.empty()) throw NoPairsError("no valid sensor pair for dependency analysis");

    std::sort(all.begin(), all.end(), [](const Candidate& x, const Candidate& y) {
        if (x.info.p != y.info.p) return x.info.p < y.info.p;
        if (std::fabs(x.info.r) != std::fabs(y.info.r))
            return std::fabs(x.info.r) > std::fabs(y.info.r);
        if (x.info.a != y.info.a) return x.info.a < y.info.a;
        return x.info.b < y.info.b;
    });
    PairRegistry registry;
    for (std::size_t i = 0; i < std::min(all.size(), kMaxPairs); ++i)
        registry.pairs.push_back(all[i].info);
    return registry;
}

std::vector<std::vector<double>> rolling_correlation_score(const SeriesGrid& grid,
                                                           const PairRegistry& registry,
                                                           std::size_t w) {
    if (w < 10) throw ConfigError("rolling window must be at least 10 steps");
    std::vector<std::vector<double>> out;
    out.reserve(registry.pairs.size());
    for (const auto& pair : registry.pairs) {
        const auto col = pair_columns(grid, pair);
        std::vector<double> dev(grid.rows(), 0.0);
        for (std::size_t t = 0; t < grid.rows(); ++t) {
            if (t + 1 < w) continue;
            std::vector<double> a, b;
            for (std::size_t s = t + 1 - w; s <= t; ++s) {
                if (is_missing(col.a[s]) || is_missing(col.b[s])) continue;
                a.push_back(col.a[s]);
                b.push_back(col.b[s]);
            }
            if (a.size() < static_cast<std::size_t>(
                               std::ceil((1.0 - kMissingTolerance) * static_cast<double>(w)))) {
                dev[t] = kMissing;  // caller substitutes the neutral deviation
                continue;
            }
            const double r = stats::pearson(a, b);  // constant windows give 0
            dev[t] = std::fabs(r - pair.r);
        }
        out.push_back(std::move(dev));
    }
    return out;
}

std::vector<GrangerFit> granger_fit(const SeriesGrid& train, const PairRegistry& registry,
                                    LagCriterion criterion) {
    if (train.rows() < 20 * kMaxLag)
        throw TooShortError("granger fitting needs at least 200 rows");

    std::vector<GrangerFit> out;
    out.reserve(registry.pairs.size());
    for (const auto& pair : registry.pairs) {
        const auto col = pair_columns(train, pair);
        GrangerFit fit;
        try {
            // Rows aligned at the maximum lag so every candidate L sees the
            // same sample and criteria are comparable.
            std::vector<std::size_t> usable;
            for (std::size_t t = kMaxLag; t < train.rows(); ++t) {
                bool ok = !is_missing(col.b[t]);
                for (std::size_t l = 1; ok && l <= kMaxLag; ++l)
                    ok = !is_missing(col.a[t - l]) && !is_missing(col.b[t - l]);
                if (ok) usable.push_back(t);
            }
            if (usable.size() < 20 * kMaxLag)
                throw DegenerateRegressionError("too few complete rows");

            double best_ic = std::numeric_limits<double>::infinity();
            for (std::size_t L = 1; L <= kMaxLag; ++L) {
                std::vector<std::vector<double>> xu, xr;
                std::vector<double> y;
                for (auto t : usable) {
                    std::vector<double> ru(1 + 2 * L), rr(1 + L);
                    ru[0] = rr[0] = 1.0;
                    for (std::size_t l = 1; l <= L; ++l) {
                        ru[l] = rr[l] = col.b[t - l];
                        ru[L + l] = col.a[t - l];
                    }
                    xu.push_back(std::move(ru));
                    xr.push_back(std::move(rr));
                    y.push_back(col.b[t]);
                }
                auto bu = least_squares(xu, y);
                const double rss_u = residual_sum_of_squares(xu, y, bu);
                const double ic = information_criterion(rss_u, y.size(), 1 + 2 * L, criterion);
                if (ic < best_ic) {
                    best_ic = ic;
                    auto br = least_squares(xr, y);
                    const double rss_r = residual_sum_of_squares(xr, y, br);
                    const double n = static_cast<double>(y.size());
                    const double df2 = n - 2.0 * static_cast<double>(L) - 1.0;
                    fit.lag = L;
                    fit.unrestricted = bu;
                    fit.restricted = br;
                    fit.f_stat = ((rss_r - rss_u) / static_cast<double>(L)) /
                                 std::max(rss_u / df2, 1e-300);
                    fit.p_value = stats::f_sf(fit.f_stat, static_cast<double>(L), df2);
                    fit.resid_scale = std::sqrt(rss_u / n);
                    fit.valid = true;
                }
            }
        } catch (const DegenerateRegressionError&) {
            fit = GrangerFit{};  // pair dropped from the Granger analyzer
        }
        out.push_back(std::move(fit));
    }
    return out;
}

std::vector<PairForest> forest_fit(const SeriesGrid& train, const PairRegistry& registry,
                                   std::uint64_t seed) {
    std::vector<PairForest> out;
    out.reserve(registry.pairs.size());
    for (const auto& pair : registry.pairs) {
        const auto col = pair_columns(train, pair);
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        std::vector<double> f(2 * kForestLags);
        for (std::size_t t = kForestLags; t < train.rows(); ++t) {
            if (is_missing(col.b[t])) continue;
            if (!forest_features(col, t, f)) continue;
            x.push_back(f);
            y.push_back(col.b[t]);
        }
        PairForest forest;
        if (x.empty()) {
            out.push_back(std::move(forest));
            continue;
        }
        forest.target_min = *std::min_element(y.begin(), y.end());
        forest.target_max = *std::max_element(y.begin(), y.end());

        const std::size_t sample = std::min<std::size_t>(x.size(), 1200);
        for (std::size_t tree = 0; tree < kForestTrees; ++tree) {
            Rng rng = Rng::derive(seed, "forest-" + pair.a + "-" + pair.b,
                                  std::to_string(tree));
            std::vector<std::size_t> idx(sample);
            for (auto& i : idx) i = rng.uniform_index(x.size());  // bootstrap
            TreeBuilder builder{x, y, {}};
            builder.build(std::move(idx), 0);
            forest.trees.push_back(std::move(builder.nodes));
        }

        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = forest_predict(forest, x[i]) - y[i];
            rss += e * e;
        }
        forest.resid_scale = std::sqrt(rss / static_cast<double>(x.size()));
        out.push_back(std::move(forest));
    }
    return out;
}

std::vector<std::vector<double>> forest_score(const SeriesGrid& grid,
                                              const PairRegistry& registry,
                                              const std::vector<PairForest>& forests) {
    std::vector<std::vector<double>> out;
    out.reserve(registry.pairs.size());
    for (std::size_t p = 0; p < registry.pairs.size(); ++p) {
        const auto col = pair_columns(grid, registry.pairs[p]);
        const auto& forest = forests[p];
        std::vector<double> dev(grid.rows(), kMissing);
        std::vector<double> f(2 * kForestLags);
        if (!forest.trees.empty() && forest.resid_scale >= kMinScale) {
            for (std::size_t t = kForestLags; t < grid.rows(); ++t) {
                if (is_missing(col.b[t])) continue;
                if (!forest_features(col, t, f)) continue;
                dev[t] = std::fabs(forest_predict(forest, f) - col.b[t]) / forest.resid_scale;
            }
        } else if (!forest.trees.empty()) {
            // Constant training target: the forest predicts it exactly.
            std::fill(dev.begin(), dev.end(), 0.0);
        }
        out.push_back(std::move(dev));
    }
    return out;
}

namespace {

/// Fused dataset scores plus warm-up length, shared by calibration and scoring.
std::vector<double> fused_scores(const SeriesGrid& grid, const DepModel& model) {
    const auto corr = rolling_correlation_score(grid, model.registry, model.window);
    const auto forest = forest_score(grid, model.registry, model.forests);
    std::vector<std::vector<double>> granger;
    granger.reserve(model.registry.pairs.size());
    for (std::size_t p = 0; p < model.registry.pairs.size(); ++p)
        granger.push_back(granger_deviation(pair_columns(grid, model.registry.pairs[p]),
                                            model.granger[p], grid.rows()));

    std::vector<double> out(grid.rows(), 0.0);
    std::vector<double> pair_scores(model.registry.pairs.size());
    for (std::size_t t = 0; t < grid.rows(); ++t) {
        for (std::size_t p = 0; p < pair_scores.size(); ++p) {
            const double c = is_missing(corr[p][t]) ? model.corr_neutral[p] : corr[p][t];
            const double g =
                is_missing(granger[p][t]) ? model.granger_neutral[p] : granger[p][t];
            const double f = is_missing(forest[p][t]) ? model.forest_neutral[p] : forest[p][t];
            pair_scores[p] = std::max({c / model.corr_scale[p], g / model.granger_scale[p],
                                       f / model.forest_scale[p]});
        }
        out[t] = *std::max_element(pair_scores.begin(), pair_scores.end());
    }
    return out;
}

}  // namespace

DepModel fit_dep(const SeriesGrid& train, std::uint64_t seed, LagCriterion criterion) {
    DepModel model;
    model.criterion = criterion;
    model.registry = select_pairs(train);
    model.granger = granger_fit(train, model.registry, criterion);
    model.forests = forest_fit(train, model.registry, seed);

    const auto corr = rolling_correlation_score(train, model.registry, model.window);
    const auto forest = forest_score(train, model.registry, model.forests);
    for (std::size_t p = 0; p < model.registry.pairs.size(); ++p) {
        auto granger = granger_deviation(pair_columns(train, model.registry.pairs[p]),
                                         model.granger[p], train.rows());
        model.corr_scale.push_back(percentile_or(corr[p], 95.0, 1.0));
        model.granger_scale.push_back(percentile_or(granger, 95.0, 1.0));
        model.forest_scale.push_back(percentile_or(forest[p], 95.0, 1.0));
        model.corr_neutral.push_back(mean_or(corr[p], 0.0));
        model.granger_neutral.push_back(mean_or(granger, 0.0));
        model.forest_neutral.push_back(mean_or(forest[p], 0.0));
    }

    auto fused = fused_scores(train, model);
    std::vector<double> calib(fused.begin() + static_cast<std::ptrdiff_t>(
                                                  std::min(model.window - 1, fused.size())),
                              fused.end());
    model.threshold = calib.empty() ? 1.0 : stats::percentile(calib, 95.0);
    return model;
}

AnomalyScoreSeries dep_score(const SeriesGrid& grid, const DepModel& model) {
    for (const auto& pair : model.registry.pairs) {
        if (!grid.has_sensor(pair.a) || !grid.has_sensor(pair.b))
            throw MissingSpecError("grid does not cover registry pair " + pair.a + "," +
                                   pair.b);
    }
    AnomalyScoreSeries out;
    out.start = grid.start;
    out.interval = grid.interval;
    out.warmup_steps = std::min(model.window - 1, grid.rows());
    out.scores = fused_scores(grid, model);
    for (std::size_t t = 0; t < out.warmup_steps; ++t) out.scores[t] = 0.0;
    return out;
}

nlohmann::json dep_model_to_json(const DepModel& model) {
    nlohmann::json j;
    j["window"] = model.window;
    j["criterion"] = model.criterion == LagCriterion::aic ? "aic" : "bic";
    j["threshold"] = model.threshold;
    j["pairs"] = nlohmann::json::array();
    for (std::size_t p = 0; p < model.registry.pairs.size(); ++p) {
        const auto& info = model.registry.pairs[p];
        const auto& g = model.granger[p];
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : model.forests[p].trees) {
            nlohmann::json tj = nlohmann::json::array();
            for (const auto& n : tree)
                tj.push_back({{"f", n.feature},
                              {"t", n.threshold},
                              {"v", n.value},
                              {"l", n.left},
                              {"r", n.right}});
            trees.push_back(std::move(tj));
        }
        j["pairs"].push_back(
            {{"a", info.a},
             {"b", info.b},
             {"r", info.r},
             {"p", info.p},
             {"granger",
              {{"valid", g.valid},
               {"lag", g.lag},
               {"unrestricted", g.unrestricted},
               {"restricted", g.restricted},
               {"f_stat", g.f_stat},
               {"p_value", g.p_value},
               {"resid_scale", g.resid_scale}}},
             {"forest",
              {{"trees", std::move(trees)},
               {"resid_scale", model.forests[p].resid_scale},
               {"target_min", model.forests[p].target_min},
               {"target_max", model.forests[p].target_max}}},
             {"scales",
              {{"corr", model.corr_scale[p]},
               {"granger", model.granger_scale[p]},
               {"forest", model.forest_scale[p]}}},
             {"neutral",
              {{"corr", model.corr_neutral[p]},
               {"granger", model.granger_neutral[p]},
               {"forest", model.forest_neutral[p]}}}});
    }
    return j;
}

DepModel dep_model_from_json(const nlohmann::json& j) {
    DepModel model;
    model.window = j.at("window").get<std::size_t>();
    model.criterion =
        j.at("criterion").get<std::string>() == "bic" ? LagCriterion::bic : LagCriterion::aic;
    model.threshold = j.at("threshold").get<double>();
    for (const auto& pj : j.at("pairs")) {
        PairInfo info;
        info.a = pj.at("a").get<std::string>();
        info.b = pj.at("b").get<std::string>();
        info.r = pj.at("r").get<double>();
        info.p = pj.at("p").get<double>();
        model.registry.pairs.push_back(info);

        const auto& gj = pj.at("granger");
        GrangerFit g;
        g.valid = gj.at("valid").get<bool>();
        g.lag = gj.at("lag").get<std::size_t>();
        g.unrestricted = gj.at("unrestricted").get<std::vector<double>>();
        g.restricted = gj.at("restricted").get<std::vector<double>>();
        g.f_stat = gj.at("f_stat").get<double>();
        g.p_value = gj.at("p_value").get<double>();
        g.resid_scale = gj.at("resid_scale").get<double>();
        model.granger.push_back(std::move(g));

        const auto& fj = pj.at("forest");
        PairForest forest;
        forest.resid_scale = fj.at("resid_scale").get<double>();
        forest.target_min = fj.at("target_min").get<double>();
        forest.target_max = fj.at("target_max").get<double>();
        for (const auto& tj : fj.at("trees")) {
            std::vector<TreeNode> tree;
            for (const auto& nj : tj) {
                TreeNode n;
                n.feature = nj.at("f").get<int>();
                n.threshold = nj.at("t").get<double>();
                n.value = nj.at("v").get<double>();
                n.left = nj.at("l").get<int>();
                n.right = nj.at("r").get<int>();
                tree.push_back(n);
            }
            forest.trees.push_back(std::move(tree));
        }
        model.forests.push_back(std::move(forest));

        model.corr_scale.push_back(pj.at("scales").at("corr").get<double>());
        model.granger_scale.push_back(pj.at("scales").at("granger").get<double>());
        model.forest_scale.push_back(pj.at("scales").at("forest").get<double>());
        model.corr_neutral.push_back(pj.at("neutral").at("corr").get<double>());
        model.granger_neutral.push_back(pj.at("neutral").at("granger").get<double>());
        model.forest_neutral.push_back(pj.at("neutral").at("forest").get<double>());
    }
    return model;
}

std::string dep_diagnostics_csv(const DepModel& model) {
    std::ostringstream out;
    out << "sensor_a,sensor_b,r_train,p_value,granger_lag,granger_f,granger_p,"
           "corr_scale,granger_scale,forest_scale\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t p = 0; p < model.registry.pairs.size(); ++p) {
        const auto& info = model.registry.pairs[p];
        const auto& g = model.granger[p];
        out << info.a << ',' << info.b << ',' << num(info.r) << ',' << num(info.p) << ','
            << (g.valid ? std::to_string(g.lag) : std::string("-")) << ',' << num(g.f_stat)
            << ',' << num(g.p_value) << ',' << num(model.corr_scale[p]) << ','
            << num(model.granger_scale[p]) << ',' << num(model.forest_scale[p]) << '\n';
    }
    return out.str();
}

}  // namespace sentinel

#include "cavres/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cavres/rng.hpp"
#include "json.hpp"

namespace cavres {

namespace {

std::vector<double> clip(std::vector<double> x, const SearchSpace& space) {
    for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = std::clamp(x[j], space.bounds[j].lo, space.bounds[j].hi);
    }
    return x;
}

void check_start(const std::vector<double>& x0, const SearchSpace& space) {
    if (space.bounds.empty()) {
        throw std::invalid_argument("search space has no bounds");
    }
    if (x0.size() != space.bounds.size()) {
        throw std::invalid_argument("start point dimension mismatch");
    }
    for (const ParamBounds& b : space.bounds) {
        if (!(b.lo < b.hi)) {
            throw std::invalid_argument("bounds must satisfy lo < hi");
        }
    }
}

// Budgeted evaluation wrapper: counts calls exactly and keeps the incumbent
// trace monotone.
struct Recorder {
    const Objective& f;
    int budget;
    int evals = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> best_params;
    std::vector<Incumbent> trace;

    bool eval(const std::vector<double>& x, double& out) {
        if (evals >= budget) return false;
        out = f(x);
        ++evals;
        if (out > best_value) {
            best_value = out;
            best_params = x;
            trace.push_back({x, out, evals});
        }
        return true;
    }

    OptResult finish(std::string method, std::vector<double> start) const {
        OptResult r;
        r.method = std::move(method);
        r.start = std::move(start);
        r.best_params = best_params;
        r.best_value = best_value;
        r.evaluations = evals;
        r.trace = trace;
        return r;
    }
};

double simplex_diameter(const std::vector<std::vector<double>>& pts) {
    double d = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            double s = 0.0;
            for (std::size_t j = 0; j < pts[a].size(); ++j) {
                const double diff = pts[a][j] - pts[b][j];
                s += diff * diff;
            }
            d = std::max(d, std::sqrt(s));
        }
    }
    return d;
}

}  // namespace

SearchSpace SearchSpace::quadratic() {
    SearchSpace s;
    s.family = ShapeFamily::Quadratic;
    s.bounds = {{0.2, 4.0}, {-2.0, 2.0}};
    return s;
}

SearchSpace SearchSpace::polyline(int k) {
    if (k < 2 || k % 2 != 0) {
        throw std::invalid_argument("polyline parameter count must be even >= 2");
    }
    SearchSpace s;
    s.family = ShapeFamily::Polyline;
    for (int v = 0; v < k / 2; ++v) {
        s.bounds.push_back({-0.5, 0.5});  // vertex x
        s.bounds.push_back({0.0, 3.0});   // vertex y
    }
    return s;
}

OptResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                      const SearchSpace& space, const OptSettings& settings) {
    check_start(x0, space);
    const std::size_t dim = x0.size();
    constexpr double rho = 1.0;    // reflection
    constexpr double chi = 2.0;    // expansion
    constexpr double gamma = 0.5;  // contraction
    constexpr double sigma = 0.5;  // shrink

    Recorder rec{f, settings.budget};
    const std::vector<double> start = clip(x0, space);

    // Initial simplex: the start plus one coordinate step per axis, stepping
    // away from the nearer bound.
    std::vector<std::vector<double>> pts;
    std::vector<double> vals;
    double v0;
    if (!rec.eval(start, v0)) return rec.finish("nelder_mead", start);
    pts.push_back(start);
    vals.push_back(v0);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<double> p = start;
        const double range = space.bounds[j].hi - space.bounds[j].lo;
        double step = settings.initial_step * range;
        if (p[j] + step > space.bounds[j].hi) step = -step;
        p[j] += step;
        p = clip(std::move(p), space);
        double v;
        if (!rec.eval(p, v)) return rec.finish("nelder_mead", start);
        pts.push_back(std::move(p));
        vals.push_back(v);
    }

    while (rec.evals < settings.budget &&
           simplex_diameter(pts) >= settings.tol) {
        // Descending by value: pts[0] best, pts[dim] worst.
        std::vector<std::size_t> order(pts.size());
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return vals[a] > vals[b];
                         });
        std::vector<std::vector<double>> spts(pts.size());
        std::vector<double> svals(vals.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            spts[i] = pts[order[i]];
            svals[i] = vals[order[i]];
        }
        pts = std::move(spts);
        vals = std::move(svals);

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);
        const std::vector<double>& worst = pts.back();

        const auto along = [&](double coef) {
            std::vector<double> p(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                p[j] = centroid[j] + coef * (centroid[j] - worst[j]);
            }
            return clip(std::move(p), space);
        };

        std::vector<double> xr = along(rho);
        double fr;
        if (!rec.eval(xr, fr)) break;

        if (fr > vals[0]) {
            std::vector<double> xe = along(rho * chi);
            double fe;
            if (!rec.eval(xe, fe)) break;
            if (fe > fr) {
                pts.back() = std::move(xe);
                vals.back() = fe;
            } else {
                pts.back() = std::move(xr);
                vals.back() = fr;
            }
            continue;
        }
        if (fr > vals[dim - 1]) {  // better than second-worst
            pts.back() = std::move(xr);
            vals.back() = fr;
            continue;
        }
        // Contraction, outside or inside of the reflection.
        const bool outside = fr > vals.back();
        std::vector<double> xc = along(outside ? gamma : -gamma);
        double fc;
        if (!rec.eval(xc, fc)) break;
        if ((outside && fc >= fr) || (!outside && fc > vals.back())) {
            pts.back() = std::move(xc);
            vals.back() = fc;
            continue;
        }
        // Shrink toward the best vertex.
        bool out_of_budget = false;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                pts[i][j] = pts[0][j] + sigma * (pts[i][j] - pts[0][j]);
            }
            if (!rec.eval(pts[i], vals[i])) {
                out_of_budget = true;
                break;
            }
        }
        if (out_of_budget) break;
    }

    return rec.finish("nelder_mead", start);
}

OptResult pattern_search(const Objective& f, const std::vector<double>& x0,
                         const SearchSpace& space, const OptSettings& settings) {
    check_start(x0, space);
    const std::size_t dim = x0.size();

    Recorder rec{f, settings.budget};
    std::vector<double> x = clip(x0, space);
    double fx;
    if (!rec.eval(x, fx)) return rec.finish("pattern_search", x);

    std::vector<double> step(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        step[j] = settings.initial_step * (space.bounds[j].hi - space.bounds[j].lo);
    }

    while (rec.evals < settings.budget &&
           *std::max_element(step.begin(), step.end()) >= settings.tol) {
        // Full compass poll in fixed axis order; move to the best improver.
        std::vector<double> best_poll;
        double best_val = fx;
        bool out_of_budget = false;
        for (std::size_t j = 0; j < dim && !out_of_budget; ++j) {
            for (const double sgn : {+1.0, -1.0}) {
                std::vector<double> p = x;
                p[j] += sgn * step[j];
                p = clip(std::move(p), space);
                if (p[j] == x[j]) continue;  // clipped onto the current point
                double v;
                if (!rec.eval(p, v)) {
                    out_of_budget = true;
                    break;
                }
                if (v > best_val) {
                    best_val = v;
                    best_poll = std::move(p);
                }
            }
        }
        if (!best_poll.empty()) {
            x = std::move(best_poll);
            fx = best_val;
        } else if (!out_of_budget) {
            for (double& s : step) s *= 0.5;
        }
        if (out_of_budget) break;
    }

    return rec.finish("pattern_search", x);
}

Objective resistance_objective(const SearchSpace& space, int grid_n,
                               int threads) {
    const ShapeFamily family = space.family;
    const double penalty = space.penalty;
    return [family, penalty, grid_n, threads](const std::vector<double>& p) {
        QuadratureConfig cfg;
        cfg.n_x = grid_n;
        cfg.n_phi = grid_n;
        cfg.threads = threads;
        try {
            Cavity cav;
            if (family == ShapeFamily::Quadratic) {
                cav = quadratic_cavity(p.at(0), p.at(1));
            } else {
                std::vector<Vec2> pts;
                pts.push_back({-0.5, 0.0});
                for (std::size_t j = 0; j + 1 < p.size(); j += 2) {
                    pts.push_back({p[j], p[j + 1]});
                }
                pts.push_back({0.5, 0.0});
                cav = polyline_cavity(pts);
            }
            return resistance_quadrature(cav, cfg).value;
        } catch (const InvalidShapeError&) {
            return penalty;
        } catch (const TraceError&) {
            // A constructible shape whose trace breaks down is as unusable as
            // one that fails validation.
            return penalty;
        }
    };
}

namespace {

// Cheap constructibility probe: build the shape, skip the quadrature. Used
// to rejection-sample starts so none of them burns its whole run inside the
// flat penalty region (for tall quadratics most of the beta range is there).
bool constructible(ShapeFamily family, const std::vector<double>& p) {
    try {
        if (family == ShapeFamily::Quadratic) {
            quadratic_cavity(p.at(0), p.at(1));
        } else {
            std::vector<Vec2> pts;
            pts.push_back({-0.5, 0.0});
            for (std::size_t j = 0; j + 1 < p.size(); j += 2) {
                pts.push_back({p[j], p[j + 1]});
            }
            pts.push_back({0.5, 0.0});
            polyline_cavity(pts);
        }
        return true;
    } catch (const InvalidShapeError&) {
        return false;
    }
}

}  // namespace

FamilyOptResult optimize_family(const SearchSpace& space,
                                const FamilyOptConfig& cfg) {
    if (cfg.multistart < 1) {
        throw std::invalid_argument("multistart must be >= 1");
    }
    const Objective f = resistance_objective(space, cfg.grid_n, cfg.threads);

    SplitMix64 rng(cfg.seed);
    FamilyOptResult out;
    const OptResult* best = nullptr;
    for (int s = 0; s < cfg.multistart; ++s) {
        std::vector<double> start(space.bounds.size());
        int tries = 0;
        do {
            for (std::size_t j = 0; j < start.size(); ++j) {
                start[j] = rng.uniform(space.bounds[j].lo, space.bounds[j].hi);
            }
        } while (!constructible(space.family, start) && ++tries < 1000);
        out.runs.push_back(nelder_mead(f, start, space, cfg.settings));
        out.runs.push_back(pattern_search(f, start, space, cfg.settings));
    }
    for (const OptResult& r : out.runs) {
        if (!best || r.best_value > best->best_value) best = &r;
    }
    out.best = *best;

    const Objective fine = resistance_objective(space, cfg.rescore_grid_n,
                                                cfg.threads);
    out.rescored_value = fine(out.best.best_params);
    return out;
}

// Top level reports the winner re-scored on the fine grid; each run keeps its
// own coarse-grid value and evaluation count.
std::string family_result_to_json(const FamilyOptResult& result) {
    nlohmann::json j;
    j["best_params"] = result.best.best_params;
    j["best_value"] = result.rescored_value;
    long long total = 0;
    for (const OptResult& r : result.runs) total += r.evaluations;
    j["evaluations"] = total;
    nlohmann::json runs = nlohmann::json::array();
    for (const OptResult& r : result.runs) {
        nlohmann::json run;
        run["method"] = r.method;
        run["start"] = r.start;
        run["best_params"] = r.best_params;
        run["best_value"] = r.best_value;
        run["evaluations"] = r.evaluations;
        runs.push_back(run);
    }
    j["runs"] = runs;
    return j.dump();
}

}  // namespace cavres

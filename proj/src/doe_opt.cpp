#include "romopt/doe_opt.hpp"

#include "romopt/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <unordered_map>
#include <utility>

namespace romopt {

Matrix DoePlan::all_points() const {
    Matrix out(vertices.rows() + interior.rows(), box.dim());
    out.topRows(vertices.rows()) = vertices;
    out.bottomRows(interior.rows()) = interior;
    return out;
}

void DoePlan::validate() const {
    box.validate();
    const int m = box.dim();
    if (vertices.cols() != m || (interior.rows() > 0 && interior.cols() != m)) {
        throw Error("DOE point dimension does not match the box");
    }
    if (vertices.rows() != (1L << m)) {
        throw Error("DOE has " + std::to_string(vertices.rows()) + " corner points, expected " +
                    std::to_string(1L << m));
    }
    for (int i = 0; i < vertices.rows(); ++i) {
        for (int k = 0; k < m; ++k) {
            if (vertices(i, k) != box.lo[k] && vertices(i, k) != box.hi[k]) {
                throw Error("corner point " + std::to_string(i) + " is not at a box corner");
            }
        }
    }
    for (int i = 0; i < interior.rows(); ++i) {
        for (int k = 0; k < m; ++k) {
            if (!(interior(i, k) > box.lo[k] && interior(i, k) < box.hi[k])) {
                throw Error("interior point " + std::to_string(i) + " is not strictly inside");
            }
        }
    }
    const Matrix all = all_points();
    for (int a = 0; a < all.rows(); ++a) {
        for (int b = a + 1; b < all.rows(); ++b) {
            if ((all.row(a) - all.row(b)).norm() == 0.0) {
                throw Error("DOE points " + std::to_string(a) + " and " + std::to_string(b) +
                            " coincide");
            }
        }
    }
}

namespace {

std::vector<int> first_primes(int count) {
    std::vector<int> primes;
    for (int n = 2; static_cast<int>(primes.size()) < count; ++n) {
        bool prime = true;
        for (int p : primes) {
            if (p * p > n) break;
            if (n % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(n);
    }
    return primes;
}

double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double digit = 1.0 / base;
    while (index > 0) {
        result += digit * static_cast<double>(index % base);
        index /= base;
        digit /= base;
    }
    return result;
}

}  // namespace

Vector halton_point(std::uint64_t index, int dim) {
    if (index == 0 || dim < 1) {
        throw Error("halton_point needs a positive index and dimension");
    }
    const std::vector<int> bases = first_primes(dim);
    Vector out(dim);
    for (int k = 0; k < dim; ++k) {
        out[k] = radical_inverse(index, bases[k]);
    }
    return out;
}

DoePlan make_doe(const Box& box, int m, int interior_count, std::uint64_t seed, int cap) {
    box.validate();
    if (m < 1) {
        throw Error("make_doe needs m >= 1");
    }
    if (m != box.dim()) {
        throw Error("make_doe called with m = " + std::to_string(m) + " on a " +
                    std::to_string(box.dim()) + "-dimensional box");
    }
    if (interior_count < 0) {
        throw Error("make_doe needs a non-negative interior count");
    }
    if (m > 30 || (1L << m) + interior_count > cap) {
        throw Error("DOE size 2^" + std::to_string(m) + " + " + std::to_string(interior_count) +
                    " exceeds the cap of " + std::to_string(cap) + " points");
    }

    DoePlan plan;
    plan.box = box;
    plan.seed = seed;
    const long corners = 1L << m;
    plan.vertices.resize(corners, m);
    for (long c = 0; c < corners; ++c) {
        for (int k = 0; k < m; ++k) {
            plan.vertices(c, k) = ((c >> k) & 1) ? box.hi[k] : box.lo[k];
        }
    }
    plan.interior.resize(interior_count, m);
    for (int i = 0; i < interior_count; ++i) {
        const Vector u = halton_point(seed + 1 + static_cast<std::uint64_t>(i), m);
        for (int k = 0; k < m; ++k) {
            plan.interior(i, k) = box.lo[k] + u[k] * (box.hi[k] - box.lo[k]);
        }
    }
    plan.validate();
    return plan;
}

namespace {

std::string point_key(const Vector& mu) {
    return std::string(reinterpret_cast<const char*>(mu.data()), sizeof(double) * mu.size());
}

// 1-D golden-section minimization; deterministic fixed iteration count.
template <typename F>
double golden_min(F&& f, double a, double b) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

// Sweeps of per-coordinate golden-section refinement inside the box.
template <typename F>
Vector coordinate_descent(F&& f, Vector start, const Box& box) {
    const double scale = box.diameter();
    for (int sweep = 0; sweep < 25; ++sweep) {
        double moved = 0.0;
        for (int k = 0; k < start.size(); ++k) {
            Vector probe = start;
            const double best = golden_min(
                [&](double x) {
                    probe[k] = x;
                    return f(probe);
                },
                box.lo[k], box.hi[k]);
            moved = std::max(moved, std::abs(best - start[k]));
            start[k] = best;
        }
        if (moved < 1e-11 * scale) {
            break;
        }
    }
    return start;
}

}  // namespace

OptimizeResult optimize_surrogate(const std::function<double(const Vector&)>& objective,
                                  const Box& box, const SurrogateSettings& settings) {
    box.validate();
    const int m = box.dim();
    if (settings.stall_iterations < 1 || settings.polish_best + settings.polish_random < 1) {
        throw Error("optimizer needs at least one stall iteration and one polish start");
    }
    const long plan_size =
        m <= 30 ? (1L << m) + std::max(settings.interior_count, 0) : std::numeric_limits<long>::max();
    if (plan_size > settings.budget) {
        throw Error("budget " + std::to_string(settings.budget) + " is below the DOE size of " +
                    std::to_string(plan_size));
    }
    DoePlan plan = make_doe(box, m, settings.interior_count, settings.seed,
                            static_cast<int>(plan_size));

    // Initial evaluation set: corners, interior, then extras (bitwise dedup).
    std::vector<Vector> initial;
    std::set<std::string> seen;
    const Matrix doe_points = plan.all_points();
    for (int i = 0; i < doe_points.rows(); ++i) {
        Vector mu = doe_points.row(i).transpose();
        if (seen.insert(point_key(mu)).second) {
            initial.push_back(std::move(mu));
        }
    }
    for (const Vector& mu : settings.extra_points) {
        if (mu.size() != m) {
            throw Error("extra DOE point has dimension " + std::to_string(mu.size()) +
                        ", expected " + std::to_string(m));
        }
        if (!box.contains(mu)) {
            throw Error("extra DOE point lies outside the box");
        }
        Vector copy = mu;
        if (seen.insert(point_key(copy)).second) {
            initial.push_back(std::move(copy));
        }
    }
    if (static_cast<int>(initial.size()) > settings.budget) {
        throw Error("budget " + std::to_string(settings.budget) + " is below the DOE size of " +
                    std::to_string(initial.size()));
    }

    OptimizeResult result;
    double best = std::numeric_limits<double>::quiet_NaN();
    Vector best_mu;
    auto record = [&](const Vector& mu, EvalKind kind) {
        TraceRow row;
        row.mu = mu;
        row.kind = kind;
        // A throwing objective (solver crash, degenerate geometry) counts
        // as a failed evaluation, same as a non-finite value.
        try {
            row.value = objective(mu);
        } catch (const std::exception&) {
            row.value = std::numeric_limits<double>::quiet_NaN();
        }
        row.failed = !std::isfinite(row.value);
        if (!row.failed && (!std::isfinite(best) || row.value < best)) {
            best = row.value;
            best_mu = mu;
        }
        row.best_so_far = best;
        result.trace.push_back(std::move(row));
        return !result.trace.back().failed;
    };

    for (const Vector& mu : initial) {
        record(mu, EvalKind::Doe);
    }
    if (!std::isfinite(best)) {
        throw Error("every DOE evaluation failed");
    }

    double f_min = std::numeric_limits<double>::infinity();
    double f_max = -std::numeric_limits<double>::infinity();
    for (const TraceRow& row : result.trace) {
        if (!row.failed) {
            f_min = std::min(f_min, row.value);
            f_max = std::max(f_max, row.value);
        }
    }
    const double f_range = f_max - f_min;
    if (f_range <= 1e-9 * std::max(1.0, std::abs(f_min))) {
        result.flat_objective = true;
        result.converged = true;
        result.best_mu = best_mu;
        result.best_value = best;
        return result;
    }

    SplitMix64 rng(settings.seed);
    auto random_point = [&] {
        Vector mu(m);
        for (int k = 0; k < m; ++k) {
            mu[k] = rng.next_in(box.lo[k], box.hi[k]);
        }
        return mu;
    };

    int stall = 0;
    while (static_cast<int>(result.trace.size()) < settings.budget) {
        // Unique successful evaluations, first-seen order.
        std::vector<const TraceRow*> ok;
        std::set<std::string> fitted;
        for (const TraceRow& row : result.trace) {
            if (!row.failed && fitted.insert(point_key(row.mu)).second) {
                ok.push_back(&row);
            }
        }
        Matrix centers(ok.size(), m);
        Matrix values(ok.size(), 1);
        for (std::size_t i = 0; i < ok.size(); ++i) {
            centers.row(i) = ok[i]->mu.transpose();
            values(i, 0) = ok[i]->value;
        }
        // Clustered infill points can make the kernel system singular;
        // escalate the ridge before giving up on further infill.
        std::optional<RbfInterpolant> surrogate;
        std::optional<double> lambda = settings.lambda_reg;
        for (int attempt = 0; attempt < 4 && !surrogate; ++attempt) {
            try {
                surrogate = rbf_fit(centers, values, settings.kernel, lambda, box);
            } catch (const SingularMatrixError&) {
                lambda = std::max(lambda.value_or(0.0) * 100.0, 1e-10);
            }
        }
        if (!surrogate) {
            break;
        }
        auto model = [&](const Vector& mu) { return rbf_eval(*surrogate, mu)[0]; };

        std::vector<const TraceRow*> ranked = ok;
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const TraceRow* a, const TraceRow* b) { return a->value < b->value; });
        std::vector<Vector> starts;
        for (int i = 0; i < settings.polish_best && i < static_cast<int>(ranked.size()); ++i) {
            starts.push_back(ranked[i]->mu);
        }
        for (int i = 0; i < settings.polish_random; ++i) {
            starts.push_back(random_point());
        }

        Vector candidate;
        double candidate_value = std::numeric_limits<double>::infinity();
        for (const Vector& start : starts) {
            const Vector polished = coordinate_descent(model, start, box);
            const double value = model(polished);
            if (value < candidate_value) {
                candidate_value = value;
                candidate = polished;
            }
        }

        // An infill that lands on an evaluated point adds nothing; explore
        // a random point instead.
        double nearest = std::numeric_limits<double>::infinity();
        for (const TraceRow& row : result.trace) {
            nearest = std::min(nearest, (row.mu - candidate).norm());
        }
        if (!candidate.size() || nearest < 1e-9 * box.diameter()) {
            candidate = random_point();
        }

        const double before = best;
        record(candidate, EvalKind::Infill);
        ++result.iterations;
        const double improvement = before - best;
        if (improvement < settings.tol * f_range) {
            ++stall;
        } else {
            stall = 0;
        }
        if (stall >= settings.stall_iterations) {
            result.converged = true;
            break;
        }
    }

    result.best_mu = best_mu;
    result.best_value = best;
    return result;
}

OptimizationReport optimize_rom_resistance(const RomModel& rom, const FfdParameterization& param,
                                           const TriMesh& base_mesh, const FlowConditions& flow,
                                           const RomOptimizationSettings& settings) {
    bool has_p = false, has_tau = false;
    for (const auto& entry : rom.layout) {
        has_p = has_p || (entry.name == "p" && entry.kind == FieldKind::Scalar);
        has_tau = has_tau || (entry.name == "tau" && entry.kind == FieldKind::Vector3);
    }
    if (!has_p || !has_tau) {
        throw Error("rom layout must carry scalar 'p' and vector3 'tau' fields");
    }
    param.validate();
    const int m = param.param_dim();
    if (m != rom.param_dim()) {
        throw Error("parameterization has " + std::to_string(m) + " dofs but the rom expects " +
                    std::to_string(rom.param_dim()));
    }

    // Deformed meshes keyed by parameter bytes; geometry reuse across the
    // trace keeps repeated evaluations cheap.
    std::unordered_map<std::uint64_t, std::pair<Vector, TriMesh>> mesh_cache;
    auto deformed_for = [&](const Vector& mu) -> const TriMesh& {
        const std::uint64_t key =
            fnv1a64(reinterpret_cast<const std::uint8_t*>(mu.data()), sizeof(double) * mu.size());
        auto it = mesh_cache.find(key);
        if (it == mesh_cache.end() || it->second.first != mu) {
            it = mesh_cache.insert_or_assign(key, std::make_pair(mu, deform_mesh(param, base_mesh, mu)))
                     .first;
        }
        return it->second.second;
    };
    auto objective = [&](const Vector& mu) {
        StateVector state;
        state.data = rom_predict(rom, mu);
        state.layout = rom.layout;
        return integrate_resistance(unflatten_fields(deformed_for(mu), state), flow,
                                    settings.direction);
    };

    SurrogateSettings surrogate = settings.surrogate;
    surrogate.extra_points.insert(surrogate.extra_points.begin(), Vector(Vector::Zero(m)));
    OptimizeResult opt = optimize_surrogate(objective, param.bounds, surrogate);

    OptimizationReport report;
    report.trace = std::move(opt.trace);
    report.iterations = opt.iterations;
    report.converged = opt.converged;
    report.flat_objective = opt.flat_objective;
    report.baseline_resistance = std::numeric_limits<double>::quiet_NaN();
    for (const TraceRow& row : report.trace) {
        if (!row.failed && row.mu.norm() == 0.0) {
            report.baseline_resistance = row.value;
            break;
        }
    }
    if (opt.flat_objective && std::isfinite(report.baseline_resistance)) {
        report.best_mu = Vector::Zero(m);
        report.best_resistance = report.baseline_resistance;
    } else {
        report.best_mu = opt.best_mu;
        report.best_resistance = opt.best_value;
    }
    if (std::isfinite(report.baseline_resistance) && report.baseline_resistance != 0.0) {
        report.percent_reduction = 100.0 *
                                   (report.baseline_resistance - report.best_resistance) /
                                   std::abs(report.baseline_resistance);
    }
    return report;
}

}  // namespace romopt

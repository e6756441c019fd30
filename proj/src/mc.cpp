#include "tse/mc.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tse/mc_kernels.hpp"
#include "tse/rng.hpp"

namespace tse {

namespace {

constexpr int kBlock = 8192;

const std::uint64_t kSaltU = rng::salt_of("price_u");
// price_v and price_ux share a salt: common random numbers for the
// Girsanov identity check.
const std::uint64_t kSaltDeriv = rng::salt_of("price_deriv");

struct Accum {
    std::int64_t n = 0;
    double mean = 0.0, m2 = 0.0;

    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }
    void merge(const Accum& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double delta = o.mean - mean;
        const std::int64_t nn = n + o.n;
        m2 += o.m2 + delta * delta * static_cast<double>(n) *
                         static_cast<double>(o.n) / static_cast<double>(nn);
        mean += delta * static_cast<double>(o.n) / static_cast<double>(nn);
        n = nn;
    }
    double std_error() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

void validate_inputs(const ModelSpec& model, double x0, double t0, double T,
                     const McConfig& cfg, const char* who) {
    if (T < t0)
        throw std::invalid_argument(std::string(who) + ": requires T >= t");
    if (model.domain == Domain::HalfLine && x0 < 0.0)
        throw std::domain_error(std::string(who) + ": x < 0 on a half-line model");
    if (cfg.n_paths < 1)
        throw std::invalid_argument(std::string(who) + ": n_paths must be >= 1");
    if (cfg.steps_per_year < 1)
        throw std::invalid_argument(std::string(who) + ": steps_per_year must be >= 1");
}

int step_count(const McConfig& cfg, double horizon) {
    const double raw = static_cast<double>(cfg.steps_per_year) * horizon;
    return std::max(1, static_cast<int>(std::ceil(raw - 1e-9)));
}

kernels::Clamp clamp_mode(const ModelSpec& model, const McConfig& cfg) {
    if (model.domain == Domain::WholeLine) return kernels::Clamp::None;
    return cfg.scheme == McScheme::EulerReflect ? kernels::Clamp::Reflect
                                                : kernels::Clamp::FloorZero;
}

double stored_of(double x, kernels::Clamp clamp) {
    return clamp == kernels::Clamp::FloorZero ? std::max(x, 0.0) : x;
}

kernels::StepFn family_kernel(const ModelSpec& model) {
    const auto& b = kernels::active_backend();
    switch (model.family) {
        case CoeffFamily::AffineSqrt: return b.affine_sqrt;
        case CoeffFamily::AffineConst: return b.affine_const;
        case CoeffFamily::LinearLevel: return b.linear;
        case CoeffFamily::Cev: return b.cev;
        case CoeffFamily::Generic: return nullptr;
    }
    return nullptr;
}

kernels::StepCoeffs coeffs_at(const ModelSpec& model, double t) {
    kernels::StepCoeffs c;
    c.gamma = model.p_gamma;
    c.s = model.vol_scale(t);
    if (model.family == CoeffFamily::LinearLevel) {
        c.a = model.drift0(t);
    } else {
        c.a = model.drift0(t);
        c.b = model.drift1(t);
    }
    return c;
}

// Same arithmetic as the family kernels but with coefficient callbacks.
void generic_step(const ModelSpec& model, double* x, double* acc, const double* z,
                  int n, double dt, double sqrt_dt, double t, kernels::Clamp clamp) {
    for (int i = 0; i < n; ++i) {
        const double xo = x[i];
        const double so = stored_of(xo, clamp);
        const double drift = model.beta(so, t);
        const double vol = model.sigma(so, t);
        const double incr = drift * dt;
        const double shock = vol * (sqrt_dt * z[i]);
        double xn = (xo + incr) + shock;
        if (clamp == kernels::Clamp::Reflect) xn = std::fabs(xn);
        const double sn = stored_of(xn, clamp);
        acc[i] += so + sn;
        x[i] = xn;
    }
}

std::vector<rng::NormalSampler> block_samplers(const McConfig& cfg, std::uint64_t salt,
                                               std::int64_t start, int bn) {
    std::vector<rng::NormalSampler> gens;
    gens.reserve(bn);
    for (int p = 0; p < bn; ++p)
        gens.emplace_back(rng::derive_stream(
            cfg.seed, salt, static_cast<std::uint64_t>(cfg.path_offset + start + p)));
    return gens;
}

[[noreturn]] void throw_nonfinite(const char* who, std::int64_t path) {
    throw std::runtime_error(std::string(who) + ": non-finite contribution at path " +
                             std::to_string(path));
}

}  // namespace

McEstimate pool_estimates(const McEstimate& a, const McEstimate& b) {
    Accum aa{a.n_paths, a.value,
             a.std_error * a.std_error * static_cast<double>(a.n_paths) *
                 static_cast<double>(std::max<std::int64_t>(a.n_paths - 1, 0))};
    Accum bb{b.n_paths, b.value,
             b.std_error * b.std_error * static_cast<double>(b.n_paths) *
                 static_cast<double>(std::max<std::int64_t>(b.n_paths - 1, 0))};
    aa.merge(bb);
    return {aa.mean, aa.std_error(), aa.n, a.n_steps == b.n_steps ? a.n_steps : 0};
}

PathBatch simulate_paths(const ModelSpec& model, double x0, double t0, double T,
                         const McConfig& cfg) {
    validate_inputs(model, x0, t0, T, cfg, "simulate_paths");
    const int m = T > t0 ? step_count(cfg, T - t0) : 0;
    if (static_cast<double>(cfg.n_paths) * (m + 1) > 5e7)
        throw std::invalid_argument(
            "simulate_paths: batch too large; reduce n_paths or steps_per_year");

    PathBatch batch;
    batch.t0 = t0;
    batch.T = T;
    batch.n_paths = cfg.n_paths;
    batch.n_steps = m;
    batch.seed = cfg.seed;
    batch.scheme = cfg.scheme;
    batch.times.resize(m + 1);
    const double dt = m > 0 ? (T - t0) / m : 0.0;
    for (int k = 0; k <= m; ++k) batch.times[k] = t0 + dt * k;
    batch.times.back() = T;
    batch.values.resize(static_cast<std::size_t>(cfg.n_paths) * (m + 1));

    if (m == 0) {
        for (std::int64_t p = 0; p < cfg.n_paths; ++p) batch.values[p] = x0;
        return batch;
    }

    const double sqdt = std::sqrt(dt);
    const kernels::Clamp clamp = clamp_mode(model, cfg);
    const kernels::StepFn fn = family_kernel(model);

    std::vector<double> x, acc, z;
    for (std::int64_t start = 0; start < cfg.n_paths; start += kBlock) {
        const int bn = static_cast<int>(std::min<std::int64_t>(kBlock, cfg.n_paths - start));
        auto gens = block_samplers(cfg, kSaltU, start, bn);
        x.assign(bn, x0);
        acc.assign(bn, 0.0);
        z.resize(bn);
        for (int p = 0; p < bn; ++p)
            batch.values[static_cast<std::size_t>(start + p) * (m + 1)] = x0;
        for (int k = 0; k < m; ++k) {
            const double tk = t0 + k * dt;
            for (int p = 0; p < bn; ++p) z[p] = gens[p].next();
            if (fn)
                fn(x.data(), acc.data(), z.data(), bn, dt, sqdt, coeffs_at(model, tk),
                   clamp);
            else
                generic_step(model, x.data(), acc.data(), z.data(), bn, dt, sqdt, tk,
                             clamp);
            for (int p = 0; p < bn; ++p)
                batch.values[static_cast<std::size_t>(start + p) * (m + 1) + k + 1] =
                    stored_of(x[p], clamp);
        }
    }
    return batch;
}

McEstimate price_u(const ModelSpec& model, const Payoff& payoff, double x0, double t0,
                   double T, const McConfig& cfg) {
    validate_inputs(model, x0, t0, T, cfg, "price_u");
    if (T == t0) return {payoff.g(x0), 0.0, cfg.n_paths, 0};

    const int m = step_count(cfg, T - t0);
    const double dt = (T - t0) / m;
    const double sqdt = std::sqrt(dt);
    const kernels::Clamp clamp = clamp_mode(model, cfg);
    const kernels::StepFn fn = family_kernel(model);

    Accum total;
    std::vector<double> x, acc, z;
    for (std::int64_t start = 0; start < cfg.n_paths; start += kBlock) {
        const int bn = static_cast<int>(std::min<std::int64_t>(kBlock, cfg.n_paths - start));
        auto gens = block_samplers(cfg, kSaltU, start, bn);
        x.assign(bn, x0);
        acc.assign(bn, 0.0);
        z.resize(bn);
        for (int k = 0; k < m; ++k) {
            const double tk = t0 + k * dt;
            for (int p = 0; p < bn; ++p) z[p] = gens[p].next();
            if (fn)
                fn(x.data(), acc.data(), z.data(), bn, dt, sqdt, coeffs_at(model, tk),
                   clamp);
            else
                generic_step(model, x.data(), acc.data(), z.data(), bn, dt, sqdt, tk,
                             clamp);
        }
        Accum blk;
        for (int p = 0; p < bn; ++p) {
            const double xT = stored_of(x[p], clamp);
            const double c = std::exp(-0.5 * dt * acc[p]) * payoff.g(xT);
            if (!std::isfinite(c)) throw_nonfinite("price_u", cfg.path_offset + start + p);
            blk.add(c);
        }
        total.merge(blk);
    }
    return {total.mean, total.std_error(), cfg.n_paths, m};
}

McEstimate price_v(const ModelSpec& model, const Payoff& payoff, double x0, double t0,
                   double T, const std::function<double(double, double)>& u_provider,
                   const McConfig& cfg) {
    validate_inputs(model, x0, t0, T, cfg, "price_v");
    if (!u_provider)
        throw std::invalid_argument("price_v: requires a u-provider (surface or oracle)");
    if (!payoff.g_prime)
        throw std::invalid_argument("price_v: payoff '" + payoff.name +
                                    "' provides no g'");
    if (T == t0) return {payoff.g_prime(x0), 0.0, cfg.n_paths, 0};

    const int m = step_count(cfg, T - t0);
    const double dt = (T - t0) / m;
    const double sqdt = std::sqrt(dt);
    const kernels::Clamp clamp = clamp_mode(model, cfg);

    Accum total;
    for (std::int64_t start = 0; start < cfg.n_paths; start += kBlock) {
        const int bn = static_cast<int>(std::min<std::int64_t>(kBlock, cfg.n_paths - start));
        auto gens = block_samplers(cfg, kSaltDeriv, start, bn);
        Accum blk;
        for (int p = 0; p < bn; ++p) {
            double y = x0;
            double so = stored_of(y, clamp);
            double accY = 0.0, accBx = 0.0, Ftr = 0.0;
            double bx_prev = model.beta_x(so, t0);
            double f_prev = u_provider(so, t0);  // D_0 = 1
            double D = 1.0;
            for (int k = 0; k < m; ++k) {
                const double tk = t0 + k * dt;
                const double tk1 = (k + 1 == m) ? T : t0 + (k + 1) * dt;
                const double z = gens[p].next();
                const double drift = model.alpha_x(so, tk) + model.beta(so, tk);
                const double vol = model.sigma(so, tk);
                const double incr = drift * dt;
                const double shock = vol * (sqdt * z);
                double yn = (y + incr) + shock;
                if (clamp == kernels::Clamp::Reflect) yn = std::fabs(yn);
                const double sn = stored_of(yn, clamp);
                accY += so + sn;
                const double bx_new = model.beta_x(sn, tk1);
                accBx += bx_prev + bx_new;
                D = std::exp(0.5 * dt * (accBx - accY));
                const double f_new = D * u_provider(sn, tk1);
                Ftr += 0.5 * (f_prev + f_new);
                y = yn;
                so = sn;
                bx_prev = bx_new;
                f_prev = f_new;
            }
            const double c = payoff.g_prime(so) * D - dt * Ftr;
            if (!std::isfinite(c)) throw_nonfinite("price_v", cfg.path_offset + start + p);
            blk.add(c);
        }
        total.merge(blk);
    }
    return {total.mean, total.std_error(), cfg.n_paths, m};
}

McEstimate price_ux_firstvariation(const ModelSpec& model, const Payoff& payoff,
                                   double x0, double t0, double T,
                                   const McConfig& cfg) {
    validate_inputs(model, x0, t0, T, cfg, "price_ux_firstvariation");
    if (!model.has_sigma_x())
        throw std::invalid_argument(
            "price_ux_firstvariation: model '" + model.name +
            "' provides no sigma_x; the first-variation process is unavailable");
    if (!payoff.g_prime)
        throw std::invalid_argument("price_ux_firstvariation: payoff '" + payoff.name +
                                    "' provides no g'");
    if (T == t0) return {payoff.g_prime(x0), 0.0, cfg.n_paths, 0};

    const int m = step_count(cfg, T - t0);
    const double dt = (T - t0) / m;
    const double sqdt = std::sqrt(dt);
    const kernels::Clamp clamp = clamp_mode(model, cfg);

    Accum total;
    for (std::int64_t start = 0; start < cfg.n_paths; start += kBlock) {
        const int bn = static_cast<int>(std::min<std::int64_t>(kBlock, cfg.n_paths - start));
        auto gens = block_samplers(cfg, kSaltDeriv, start, bn);
        Accum blk;
        for (int p = 0; p < bn; ++p) {
            double x = x0, xi = 1.0;
            double so = stored_of(x, clamp);
            double accX = 0.0, accXi = 0.0;
            for (int k = 0; k < m; ++k) {
                const double tk = t0 + k * dt;
                const double z = gens[p].next();  // one W drives both x and xi
                const double bx = model.beta_x(so, tk);
                const double sx = model.sigma_x(so, tk);
                const double xi_incr = (xi * bx) * dt;
                const double xi_shock = (xi * sx) * (sqdt * z);
                const double xin = (xi + xi_incr) + xi_shock;
                const double drift = model.beta(so, tk);
                const double vol = model.sigma(so, tk);
                const double incr = drift * dt;
                const double shock = vol * (sqdt * z);
                double xn = (x + incr) + shock;
                if (clamp == kernels::Clamp::Reflect) xn = std::fabs(xn);
                const double sn = stored_of(xn, clamp);
                accX += so + sn;
                accXi += xi + xin;
                x = xn;
                xi = xin;
                so = sn;
            }
            const double disc = std::exp(-0.5 * dt * accX);
            const double gp = payoff.g_prime(so);
            const double c = gp * xi * disc - payoff.g(so) * disc * (0.5 * dt * accXi);
            if (!std::isfinite(c))
                throw_nonfinite("price_ux_firstvariation", cfg.path_offset + start + p);
            blk.add(c);
        }
        total.merge(blk);
    }
    return {total.mean, total.std_error(), cfg.n_paths, m};
}

std::vector<ConvergenceRow> mc_convergence_table(
    McQuantity quantity, const ModelSpec& model, const Payoff& payoff, double x0,
    double t0, double T, const std::function<double(double, double)>& u_provider,
    const McConfig& base, std::span<const std::int64_t> path_schedule,
    std::span<const int> step_schedule) {
    if (path_schedule.empty() || path_schedule.size() != step_schedule.size())
        throw std::invalid_argument(
            "mc_convergence_table: path and step schedules must be non-empty and of "
            "equal length");
    for (std::size_t i = 1; i < path_schedule.size(); ++i)
        if (path_schedule[i] < path_schedule[i - 1] || step_schedule[i] < step_schedule[i - 1])
            throw std::invalid_argument("mc_convergence_table: schedules must be increasing");
    std::vector<ConvergenceRow> rows;
    rows.reserve(path_schedule.size());
    for (std::size_t i = 0; i < path_schedule.size(); ++i) {
        McConfig cfg = base;
        cfg.n_paths = path_schedule[i];
        cfg.steps_per_year = step_schedule[i];
        const McEstimate e =
            quantity == McQuantity::PriceU
                ? price_u(model, payoff, x0, t0, T, cfg)
                : price_v(model, payoff, x0, t0, T, u_provider, cfg);
        rows.push_back({cfg.n_paths, e.n_steps, e.value, e.std_error});
    }
    return rows;
}

void write_paths_csv(const PathBatch& batch, std::ostream& os) {
    os << std::setprecision(17);
    os << "path_id,step,time,value\n";
    for (std::int64_t p = 0; p < batch.n_paths; ++p)
        for (int k = 0; k <= batch.n_steps; ++k)
            os << p << ',' << k << ',' << batch.times[k] << ',' << batch.at(p, k) << '\n';
}

}  // namespace tse

#pragma once

// Experiment harness: the four acquisition settings, N sweeps with paired
// seeds, error aggregation, the NN ordering-error histogram and log-log
// slope fits.

#include <uvtomo/diagnostics.hpp>
#include <uvtomo/error.hpp>
#include <uvtomo/image.hpp>
#include <uvtomo/io.hpp>
#include <uvtomo/ordering.hpp>
#include <uvtomo/phantom.hpp>
#include <uvtomo/radon.hpp>
#include <uvtomo/reconstruct.hpp>
#include <uvtomo/rng.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace uvtomo::harness {

enum class Setting { noiseless_perfect, noisy_perfect, noisy_synthetic_order, noisy_nn_order };

inline constexpr Setting all_settings[] = {Setting::noiseless_perfect, Setting::noisy_perfect,
                                           Setting::noisy_synthetic_order, Setting::noisy_nn_order};

inline std::string to_string(Setting s) {
    switch (s) {
    case Setting::noiseless_perfect: return "noiseless_perfect";
    case Setting::noisy_perfect: return "noisy_perfect";
    case Setting::noisy_synthetic_order: return "noisy_synthetic_order";
    case Setting::noisy_nn_order: return "noisy_nn_order";
    }
    return "unknown";
}

inline Setting parse_setting(std::string_view name) {
    for (Setting s : all_settings)
        if (to_string(s) == name) return s;
    if (name == "i") return Setting::noiseless_perfect;
    if (name == "ii") return Setting::noisy_perfect;
    if (name == "iii") return Setting::noisy_synthetic_order;
    if (name == "iv") return Setting::noisy_nn_order;
    throw InvalidArgument("unknown setting '" + std::string(name) + "'");
}

inline bool is_noisy(Setting s) { return s != Setting::noiseless_perfect; }

/// delta_bar(N) = ceil(delta_scale * sqrt(N)), n_delta(N) = ceil(n_delta_scale * (ln N)^2).
struct DeltaPolicy {
    double delta_scale = 1.0;
    double n_delta_scale = 1.0;

    int delta_bar(std::size_t n) const {
        return static_cast<int>(std::ceil(delta_scale * std::sqrt(static_cast<double>(n))));
    }
    std::size_t n_delta(std::size_t n) const {
        const double l = std::log(static_cast<double>(n));
        return static_cast<std::size_t>(std::ceil(n_delta_scale * l * l));
    }
};

enum class Profile { ci, full };

inline Profile parse_profile(std::string_view name) {
    if (name == "ci") return Profile::ci;
    if (name == "full") return Profile::full;
    throw InvalidArgument("unknown profile '" + std::string(name) + "'");
}

struct ExperimentSpec {
    std::vector<Setting> settings{all_settings, all_settings + 4};
    std::vector<std::size_t> n_list{500, 1000, 2000, 4000, 8000};
    std::size_t trials = 30;
    double sigma_rel = 0.01;
    DeltaPolicy delta_policy;
    tomo::ReconstructionConfig cfg;
    RngSeed seed{1};
    std::optional<std::filesystem::path> phantom; // empty: built-in phantom
    std::size_t phantom_grid = 128;
    std::size_t bins = 128;
    int delta_probe = 4;
    bool reversed_diagnostic = true; // also score the reversed order of flagged runs
    std::size_t threads = 0;          // 0: hardware concurrency

    void validate() const {
        if (settings.empty()) throw InvalidArgument("ExperimentSpec: no settings");
        if (n_list.empty()) throw InvalidArgument("ExperimentSpec: n_list is empty");
        for (std::size_t i = 1; i < n_list.size(); ++i)
            if (n_list[i] <= n_list[i - 1]) throw InvalidArgument("ExperimentSpec: n_list must be strictly ascending");
        if (n_list.front() < 2) throw InvalidArgument("ExperimentSpec: N must be at least 2");
        if (trials < 1) throw InvalidArgument("ExperimentSpec: trials must be >= 1");
        if (!(sigma_rel >= 0.0)) throw InvalidArgument("ExperimentSpec: sigma_rel must be non-negative");
        if (bins < 2) throw InvalidArgument("ExperimentSpec: bins must be >= 2");
        if (delta_probe < 0) throw InvalidArgument("ExperimentSpec: delta_probe must be non-negative");
        cfg.validate();
    }

    /// The ci profile caps trials at 5 and drops N above 2000 (keeping at least one N).
    ExperimentSpec with_profile(Profile p) const {
        ExperimentSpec out = *this;
        if (p == Profile::ci) {
            out.trials = std::min<std::size_t>(trials, 5);
            std::vector<std::size_t> kept;
            for (auto n : n_list)
                if (n <= 2000) kept.push_back(n);
            if (kept.empty()) kept.push_back(n_list.front());
            out.n_list = kept;
        }
        return out;
    }
};

inline ExperimentSpec spec_from_json(const io::json& j) {
    if (!j.is_object()) throw FormatError("experiment spec: expected a JSON object");
    ExperimentSpec s;
    try {
        if (j.contains("setting")) s.settings = {parse_setting(j.at("setting").get<std::string>())};
        if (j.contains("settings")) {
            s.settings.clear();
            for (const auto& v : j.at("settings")) s.settings.push_back(parse_setting(v.get<std::string>()));
        }
        if (j.contains("n_list")) s.n_list = j.at("n_list").get<std::vector<std::size_t>>();
        if (j.contains("trials")) s.trials = j.at("trials").get<std::size_t>();
        if (j.contains("sigma_rel")) s.sigma_rel = j.at("sigma_rel").get<double>();
        if (j.contains("delta_policy")) {
            const auto& d = j.at("delta_policy");
            s.delta_policy.delta_scale = d.value("delta_scale", 1.0);
            s.delta_policy.n_delta_scale = d.value("n_delta_scale", 1.0);
        }
        if (j.contains("seed")) s.seed = RngSeed{j.at("seed").get<std::uint64_t>()};
        if (j.contains("phantom") && !j.at("phantom").is_null())
            s.phantom = std::filesystem::path(j.at("phantom").get<std::string>());
        if (j.contains("phantom_grid")) s.phantom_grid = j.at("phantom_grid").get<std::size_t>();
        if (j.contains("bins")) s.bins = j.at("bins").get<std::size_t>();
        if (j.contains("delta_probe")) s.delta_probe = j.at("delta_probe").get<int>();
        if (j.contains("reversed_diagnostic")) s.reversed_diagnostic = j.at("reversed_diagnostic").get<bool>();
        if (j.contains("threads")) s.threads = j.at("threads").get<std::size_t>();
        if (j.contains("cfg")) {
            const auto& c = j.at("cfg");
            auto opt_num = [&](const char* key) -> std::optional<double> {
                if (!c.contains(key) || c.at(key).is_null()) return std::nullopt;
                if (c.at(key).is_string()) {
                    if (c.at(key).get<std::string>() == "auto") return std::nullopt;
                    throw FormatError(std::string("cfg.") + key + ": expected a number or \"auto\"");
                }
                return c.at(key).get<double>();
            };
            s.cfg.nu0 = opt_num("nu0");
            if (auto k = opt_num("k0")) s.cfg.k0 = static_cast<int>(*k);
            if (auto m = opt_num("spokes")) s.cfg.spokes = static_cast<std::size_t>(*m);
            s.cfg.nu0_energy_fraction = c.value("nu0_energy_fraction", s.cfg.nu0_energy_fraction);
            s.cfg.cap_ring_k0 = c.value("cap_ring_k0", s.cfg.cap_ring_k0);
            s.cfg.ring_k0_margin = c.value("ring_k0_margin", s.cfg.ring_k0_margin);
            s.cfg.oversample = c.value("oversample", s.cfg.oversample);
            s.cfg.grid = c.value("grid", s.cfg.grid);
        }
    } catch (const io::json::exception& e) {
        throw FormatError(std::string("experiment spec: ") + e.what());
    }
    s.validate();
    return s;
}

/// ||fhat - f||^2 / ||f||^2 over all pixels.
inline double relative_error(const Image2D& f, const Image2D& fhat) {
    if (f.width() != fhat.width() || f.height() != fhat.height())
        throw InvalidArgument("relative_error: image sizes differ");
    const double ref = f.squared_norm();
    if (!(ref > 0.0)) throw DomainError("relative_error: reference image is zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.pixels().size(); ++i) {
        const double d = fhat.pixels()[i] - f.pixels()[i];
        acc += d * d;
    }
    return acc / ref;
}

/// Least-squares slope of ln(y) against ln(x).
inline double slope_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("slope_fit: size mismatch");
    if (x.size() < 3) throw InvalidArgument("slope_fit: need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("slope_fit: values must be positive");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw DomainError("slope_fit: x values are all equal");
    return sxy / sxx;
}

struct TrialRecord {
    Setting setting{};
    std::size_t n = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double error = 0.0;
    std::size_t n_delta = 0;
    int delta_probe = 0;
    bool reversed = false;
    double wall_ms = 0.0;
    // Diagnostics kept out of the CSV.
    std::optional<double> reversed_error; // E of the reversed order, flagged runs only
    double mass_residual = 0.0;
    double in_disc_sq = 0.0;              // ||unmasked - f_disc||^2
    double tail_sq = 0.0;                 // ||f - f_disc||^2
    double total_sq = 0.0;                // ||fhat - f||^2
    double nu0 = 0.0;
    int k0 = 0;
    std::size_t spokes = 0;
};

struct Aggregate {
    Setting setting{};
    std::size_t n = 0;
    std::size_t runs = 0;
    double mean_error = 0.0;
    double median_error = 0.0;
    double mean_error_unreversed = 0.0;
    double median_error_unreversed = 0.0;
    std::size_t reversed_runs = 0;
    std::optional<double> mean_reversed_diagnostic;
};

struct ExperimentResult {
    std::vector<TrialRecord> records;
    std::vector<Aggregate> aggregates;

    const Aggregate& aggregate(Setting s, std::size_t n) const {
        for (const auto& a : aggregates)
            if (a.setting == s && a.n == n) return a;
        throw InvalidArgument("no aggregate for " + to_string(s) + " at N=" + std::to_string(n));
    }
};

inline double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline double mean(std::span<const double> v) {
    if (v.empty()) return std::nan("");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline std::vector<Aggregate> aggregate(const std::vector<TrialRecord>& records) {
    std::map<std::pair<int, std::size_t>, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) groups[{static_cast<int>(r.setting), r.n}].push_back(&r);
    std::vector<Aggregate> out;
    for (const auto& [key, rs] : groups) {
        Aggregate a;
        a.setting = static_cast<Setting>(key.first);
        a.n = key.second;
        a.runs = rs.size();
        std::vector<double> all, kept, rev;
        for (const auto* r : rs) {
            all.push_back(r->error);
            if (r->reversed) {
                ++a.reversed_runs;
                if (r->reversed_error) rev.push_back(*r->reversed_error);
            } else {
                kept.push_back(r->error);
            }
        }
        a.mean_error = mean(all);
        a.median_error = median(all);
        a.mean_error_unreversed = mean(kept);
        a.median_error_unreversed = median(kept);
        if (!rev.empty()) a.mean_reversed_diagnostic = mean(rev);
        out.push_back(a);
    }
    return out;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0: hardware
/// concurrency). Each index runs exactly once; results go wherever fn puts them.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline Image2D load_phantom(const ExperimentSpec& spec) {
    return spec.phantom ? io::read_image(*spec.phantom) : phantom::default_phantom(spec.phantom_grid);
}

/// Seed of trial t at projection count N; every setting of that (N, t) shares
/// it, so the settings see the same angles and the same noise.
inline RngSeed trial_seed(RngSeed root, std::size_t n, std::size_t trial) {
    return derive_seed(derive_seed(root, n), trial);
}

namespace stream {
inline constexpr std::uint64_t angles = 1;
inline constexpr std::uint64_t noise = 2;
inline constexpr std::uint64_t order = 3;
} // namespace stream

/// One (N, trial) job: a shared clean sinogram, then every requested setting.
inline std::vector<TrialRecord> run_trial(const ExperimentSpec& spec, const Image2D& f, std::size_t n,
                                          std::size_t trial) {
    using clock = std::chrono::steady_clock;
    const RngSeed seed = trial_seed(spec.seed, n, trial);
    const auto angles = tomo::draw_anchored_angles(n, derive_seed(seed, stream::angles));
    const Sinogram clean = tomo::radon(f, angles, spec.bins);
    const double mass = tomo::mass_conservation_residual(f, clean);
    std::optional<Sinogram> noisy;

    tomo::ReconstructionConfig cfg = spec.cfg;
    cfg.grid = f.width();
    cfg.pixel_size = f.pixel_size();
    // One cutoff per (N, trial), taken from the clean data, so that settings
    // differ only in noise and ordering. Noise would otherwise widen the
    // spectrum and move the automatic cutoff.
    if (!cfg.nu0) cfg.nu0 = tomo::auto_nu0(tomo::project_spectra(clean, cfg.oversample), cfg.nu0_energy_fraction);

    std::vector<TrialRecord> out;
    for (Setting setting : spec.settings) {
        const auto t0 = clock::now();
        if (is_noisy(setting) && !noisy)
            noisy = tomo::add_projection_noise(clean, spec.sigma_rel, derive_seed(seed, stream::noise));
        const Sinogram& s = is_noisy(setting) ? *noisy : clean;

        ordering::Permutation order = ordering::Permutation::identity(n, true);
        if (setting == Setting::noisy_synthetic_order) {
            order = ordering::synth_good_map(n, spec.delta_policy.delta_bar(n), spec.delta_policy.n_delta(n),
                                             derive_seed(seed, stream::order));
        } else if (setting == Setting::noisy_nn_order) {
            order = ordering::nn_order(s.data(), s.num_bins(), 0);
        }

        const auto rec = tomo::reconstruct_detailed(s, cfg, order);
        TrialRecord r;
        r.setting = setting;
        r.n = n;
        r.trial = trial;
        r.seed = seed.value;
        r.error = relative_error(f, rec.image);
        r.n_delta = ordering::measure_goodness(order, spec.delta_probe).n_delta;
        r.delta_probe = spec.delta_probe;
        r.reversed = ordering::is_reversed(order);
        r.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        if (r.reversed && spec.reversed_diagnostic) {
            const auto flipped = tomo::reconstruct_detailed(s, cfg, ordering::reverse_after_anchor(order));
            r.reversed_error = relative_error(f, flipped.image);
        }
        r.mass_residual = mass;
        r.nu0 = rec.nu0;
        r.k0 = rec.k0;
        r.spokes = rec.spokes;

        const Image2D disc = tomo::disc_truncate(f, rec.nu0);
        const double ref = f.squared_norm();
        r.total_sq = r.error * ref;
        r.in_disc_sq = relative_error(disc, rec.unmasked) * disc.squared_norm();
        r.tail_sq = relative_error(f, disc) * ref;
        out.push_back(r);
    }
    return out;
}

using ProgressFn = std::function<void(const TrialRecord&)>;

/// Every (N, trial) pair as an independent job; records come back sorted by
/// (setting order in the spec, N, trial) regardless of completion order.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const Image2D& f, const ProgressFn& progress = {}) {
    spec.validate();
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (auto n : spec.n_list)
        for (std::size_t t = 0; t < spec.trials; ++t) jobs.emplace_back(n, t);
    std::vector<std::vector<TrialRecord>> slots(jobs.size());
    std::mutex progress_mutex;
    parallel_for(jobs.size(), spec.threads, [&](std::size_t i) {
        slots[i] = run_trial(spec, f, jobs[i].first, jobs[i].second);
        if (progress) {
            std::lock_guard lock(progress_mutex);
            for (const auto& r : slots[i]) progress(r);
        }
    });

    ExperimentResult result;
    for (std::size_t si = 0; si < spec.settings.size(); ++si)
        for (const auto& slot : slots) result.records.push_back(slot[si]);
    result.aggregates = aggregate(result.records);
    return result;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {}) {
    return run_experiment(spec, load_phantom(spec), progress);
}

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{"setting", "N",        "trial",    "seed",   "E",
                                               "n_delta", "delta_probe", "reversed", "wall_ms"};
    return cols;
}

inline io::CsvTable to_csv(const ExperimentResult& res) {
    io::CsvTable t;
    t.columns = csv_columns();
    for (const auto& r : res.records) {
        t.rows.push_back({to_string(r.setting), std::to_string(r.n), std::to_string(r.trial), std::to_string(r.seed),
                          io::format_double(r.error), std::to_string(r.n_delta), std::to_string(r.delta_probe),
                          r.reversed ? "1" : "0", io::format_double(r.wall_ms)});
    }
    return t;
}

/// Aggregates, slopes of mean E against N per setting, and per-run
/// diagnostics that do not belong in the CSV.
inline io::json summary_json(const ExperimentSpec& spec, const ExperimentResult& res) {
    io::json j;
    j["seed"] = spec.seed.value;
    j["trials"] = spec.trials;
    j["n_list"] = spec.n_list;
    j["sigma_rel"] = spec.sigma_rel;
    auto& aggs = j["aggregates"] = io::json::array();
    for (const auto& a : res.aggregates) {
        io::json e{{"setting", to_string(a.setting)},
                   {"N", a.n},
                   {"runs", a.runs},
                   {"mean_E", a.mean_error},
                   {"median_E", a.median_error},
                   {"reversed_runs", a.reversed_runs}};
        if (a.reversed_runs < a.runs) {
            e["mean_E_unreversed"] = a.mean_error_unreversed;
            e["median_E_unreversed"] = a.median_error_unreversed;
        }
        if (a.mean_reversed_diagnostic) e["mean_E_reversed_order"] = *a.mean_reversed_diagnostic;
        aggs.push_back(e);
    }
    auto& slopes = j["slopes"] = io::json::object();
    if (spec.n_list.size() >= 3) {
        for (Setting s : spec.settings) {
            std::vector<double> xs, ys;
            for (auto n : spec.n_list) {
                xs.push_back(static_cast<double>(n));
                ys.push_back(res.aggregate(s, n).mean_error);
            }
            slopes[to_string(s)] = slope_fit(xs, ys);
        }
    }
    double worst_mass = 0.0;
    std::size_t decomposition_violations = 0;
    for (const auto& r : res.records) {
        worst_mass = std::max(worst_mass, r.mass_residual);
        if (r.total_sq > 4.0 * r.in_disc_sq + r.tail_sq) ++decomposition_violations;
    }
    j["max_mass_residual"] = worst_mass;
    j["decomposition_violations"] = decomposition_violations;
    return j;
}

struct OrderingHistogram {
    std::vector<double> edges;           // bin b holds n_delta / N in [edges[b], edges[b+1])
    std::vector<std::size_t> counts;     // non-reversed runs only
    std::size_t reversed_runs = 0;
    std::vector<std::size_t> n_delta;    // per seed, as measured
    std::vector<char> reversed;          // per seed
};

struct HistogramSpec {
    std::size_t n = 4000;
    std::size_t seeds = 30;
    int delta_probe = 4;
    std::size_t bins = 128;
    RngSeed seed{1};
    std::vector<double> edges{0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0 + 1e-12};
    std::size_t threads = 0;
};

/// Bins per-run n_delta values (as fractions of N) with reversed runs
/// counted apart.
inline OrderingHistogram bin_ordering_errors(std::vector<std::size_t> n_delta, std::vector<char> reversed, std::size_t n,
                                             std::vector<double> edges) {
    if (edges.size() < 2) throw InvalidArgument("ordering histogram: need at least two edges");
    if (n_delta.size() != reversed.size()) throw InvalidArgument("ordering histogram: size mismatch");
    if (n == 0) throw InvalidArgument("ordering histogram: N must be positive");
    OrderingHistogram h;
    h.edges = std::move(edges);
    h.counts.assign(h.edges.size() - 1, 0);
    for (std::size_t k = 0; k < n_delta.size(); ++k) {
        if (reversed[k]) {
            ++h.reversed_runs;
            continue;
        }
        const double frac = static_cast<double>(n_delta[k]) / static_cast<double>(n);
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
            if (frac >= h.edges[b] && frac < h.edges[b + 1]) ++h.counts[b];
    }
    h.n_delta = std::move(n_delta);
    h.reversed = std::move(reversed);
    return h;
}

/// NN ordering of clean projections at fresh random angles per seed, scored
/// against the true order at delta_probe.
inline OrderingHistogram ordering_histogram(const HistogramSpec& spec, const Image2D& f) {
    if (spec.seeds == 0) throw InvalidArgument("ordering_histogram: need at least one seed");
    std::vector<std::size_t> n_delta(spec.seeds, 0);
    std::vector<char> reversed(spec.seeds, 0);
    parallel_for(spec.seeds, spec.threads, [&](std::size_t k) {
        const RngSeed seed = trial_seed(spec.seed, spec.n, k);
        const auto angles = tomo::draw_anchored_angles(spec.n, derive_seed(seed, stream::angles));
        const Sinogram s = tomo::radon(f, angles, spec.bins);
        const auto order = ordering::nn_order(s.data(), s.num_bins(), 0);
        n_delta[k] = ordering::measure_goodness(order, spec.delta_probe).n_delta;
        reversed[k] = ordering::is_reversed(order) ? 1 : 0;
    });
    return bin_ordering_errors(std::move(n_delta), std::move(reversed), spec.n, spec.edges);
}

} // namespace uvtomo::harness

// Command-line front end: phantoms, projection, reconstruction, orderings,
// 1D sweeps and the experiment harness.

#include <uvtomo/uvtomo.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace uvtomo;
namespace fs = std::filesystem;

std::optional<double> parse_auto(const std::string& text, const char* what) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(std::string(what) + ": expected a number or 'auto', got '" + text + "'");
    }
}

/// Row order that sorts the stored ground-truth angles.
ordering::Permutation order_from_angles(const std::vector<double>& angles) {
    std::vector<int> map(angles.size());
    std::iota(map.begin(), map.end(), 1);
    std::stable_sort(map.begin(), map.end(), [&](int a, int b) {
        return angles[static_cast<std::size_t>(a - 1)] < angles[static_cast<std::size_t>(b - 1)];
    });
    const bool anchored = map.front() == 1;
    return ordering::Permutation(std::move(map), anchored);
}

struct PhantomArgs {
    std::string out;
    std::size_t grid = 128;
    std::string kind = "gaussian";
    double radius = 0.5;
};

struct ProjectArgs {
    std::string image, out;
    std::uint64_t angles_seed = 1;
    std::size_t n = 1000;
    std::size_t bins = 128;
    double noise = 0.0;
    std::uint64_t noise_seed = 2;
};

struct ReconstructArgs {
    std::string sinogram, out, order = "nn", order_file, nu0 = "auto", k0 = "auto";
    std::size_t m = 0, grid = 128, oversample = 2;
    double pixel_size = 0.0;
};

struct FstArgs {
    std::string image;
    std::size_t angles = 8, bins = 0;
};

struct OrderArgs {
    std::string sinogram, out;
    std::size_t start = 0;
};

struct PerturbArgs {
    std::string perm, out;
    std::size_t n = 0;
    std::size_t shuffle = 0;
    std::vector<std::size_t> shift;
    std::vector<long long> synth;
    std::uint64_t seed = 1;
};

struct GoodnessArgs {
    std::string perm;
    int delta_bar = 4;
};

struct SweepArgs {
    std::vector<std::size_t> n_list{512, 1024, 2048, 4096, 8192, 16384};
    std::size_t trials = 50;
    double gamma = 0.8, d = 1.0, sigma = 0.0;
    int k1 = 0, kmax = 60;
    bool synthetic_order = false;
    std::uint64_t seed = 1;
    std::string out;
};

struct ExperimentArgs {
    std::string spec, out, summary, profile = "full";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    bool quiet = false;
};

int run_phantom(const PhantomArgs& a) {
    Image2D img = a.kind == "disc" ? phantom::disc(a.grid, phantom::default_fov, a.radius)
                                   : phantom::default_phantom(a.grid);
    io::write_image(a.out, img);
    std::cout << "wrote " << a.out << " (" << a.grid << "x" << a.grid << ", support radius " << img.support_radius()
              << ")\n";
    return 0;
}

int run_project(const ProjectArgs& a) {
    const Image2D img = io::read_image(a.image);
    const auto angles = tomo::draw_anchored_angles(a.n, RngSeed{a.angles_seed});
    Sinogram s = tomo::radon(img, angles, a.bins);
    if (a.noise > 0.0) s = tomo::add_projection_noise(s, a.noise, RngSeed{a.noise_seed});
    io::write_sinogram(a.out, s);
    std::cout << "wrote " << a.out << " (" << a.n << " projections, " << a.bins << " bins)\n";
    return 0;
}

int run_reconstruct(const ReconstructArgs& a) {
    const Sinogram s = io::read_sinogram(a.sinogram);
    ordering::Permutation order;
    if (a.order == "nn") {
        order = ordering::nn_order(s.data(), s.num_bins(), 0);
    } else if (a.order == "file") {
        if (a.order_file.empty()) throw InvalidArgument("--order file needs --order-file");
        order = ordering::read_permutation(a.order_file);
    } else if (a.order == "true") {
        if (!s.angles()) throw InvalidArgument("--order true needs a sinogram with stored angles");
        order = order_from_angles(*s.angles());
    } else {
        throw InvalidArgument("--order must be nn, file or true");
    }
    tomo::ReconstructionConfig cfg;
    cfg.nu0 = parse_auto(a.nu0, "--nu0");
    if (auto k = parse_auto(a.k0, "--k0")) cfg.k0 = static_cast<int>(*k);
    if (a.m > 0) cfg.spokes = a.m;
    cfg.grid = a.grid;
    cfg.oversample = a.oversample;
    if (a.pixel_size > 0.0) cfg.pixel_size = a.pixel_size;
    const auto rec = tomo::reconstruct_detailed(s, cfg, order);
    io::write_image(a.out, rec.image);
    std::cout << "wrote " << a.out << " (nu0 " << rec.nu0 << ", k0 " << rec.k0 << ", M " << rec.spokes << ", rings "
              << rec.rings << ", reversed " << (ordering::is_reversed(order) ? "yes" : "no") << ")\n";
    return 0;
}

int run_fst(const FstArgs& a) {
    const Image2D img = io::read_image(a.image);
    std::vector<double> angles(a.angles);
    for (std::size_t i = 0; i < a.angles; ++i)
        angles[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(a.angles);
    const std::size_t bins = a.bins ? a.bins : img.width();
    double worst = 0.0;
    for (const auto& c : tomo::fourier_slice_check(img, angles, bins)) {
        std::printf("theta=%.6f relative_l2=%.6e\n", c.angle, c.relative_l2);
        worst = std::max(worst, c.relative_l2);
    }
    std::printf("max relative_l2=%.6e\n", worst);
    return 0;
}

int run_order(const OrderArgs& a) {
    const Sinogram s = io::read_sinogram(a.sinogram);
    const auto order = ordering::nn_order(s.data(), s.num_bins(), a.start);
    ordering::write_permutation(a.out, order);
    std::cout << "wrote " << a.out << " (correlation " << ordering::order_correlation(order) << ")\n";
    return 0;
}

int run_perturb(const PerturbArgs& a) {
    ordering::Permutation p;
    if (!a.perm.empty()) {
        p = ordering::read_permutation(a.perm);
    } else if (a.n > 0) {
        p = ordering::Permutation::identity(a.n, true);
    } else {
        throw InvalidArgument("perturb: give --perm or --n");
    }
    if (!a.synth.empty()) {
        if (a.synth.size() != 2 || a.synth[0] < 0 || a.synth[1] < 0)
            throw InvalidArgument("--synth takes DELTA_BAR N_DELTA");
        p = ordering::synth_good_map(p.size(), static_cast<int>(a.synth[0]), static_cast<std::size_t>(a.synth[1]),
                                     RngSeed{a.seed});
    }
    if (!a.shift.empty()) {
        if (a.shift.size() != 3) throw InvalidArgument("--shift takes START LEN INSERT_AT");
        p = ordering::perturb_shift(p, a.shift[0], a.shift[1], a.shift[2]);
    }
    if (a.shuffle > 0) p = ordering::perturb_shuffle(p, a.shuffle, RngSeed{a.seed});
    ordering::write_permutation(a.out, p);
    std::cout << "wrote " << a.out << "\n";
    return 0;
}

int run_goodness(const GoodnessArgs& a) {
    const auto p = ordering::read_permutation(a.perm);
    const auto q = ordering::measure_goodness(p, a.delta_bar);
    io::json j{{"N", p.size()},
               {"delta_bar", q.delta_bar},
               {"n_delta", q.n_delta},
               {"correlation", ordering::order_correlation(p)},
               {"reversed", ordering::is_reversed(p)}};
    std::cout << j.dump() << "\n";
    return 0;
}

int run_qbl_sweep(const SweepArgs& a) {
    const qbl::QblParams params{a.k1, a.gamma, a.d};
    params.validate();
    const FourierSeries g = qbl::exponential_decay_series(params, a.kmax, 1.0);
    io::CsvTable t;
    t.columns = {"N", "trial", "seed", "k0", "sq_error"};
    for (auto n : a.n_list) {
        double mean = 0.0;
        for (std::size_t trial = 0; trial < a.trials; ++trial) {
            const RngSeed seed = derive_seed(derive_seed(RngSeed{a.seed}, n), trial);
            const auto t_sorted = sample_sorted_uniform(n, 0.0, 1.0, derive_seed(seed, 1));
            std::vector<int> map;
            if (a.synthetic_order) {
                const double l = std::log(static_cast<double>(n));
                const auto h = ordering::synth_good_map(n, static_cast<int>(std::ceil(std::sqrt(double(n)))),
                                                        static_cast<std::size_t>(std::ceil(l * l)),
                                                        derive_seed(seed, 3));
                map.assign(h.map().begin(), h.map().end());
            }
            auto samples = qbl::observe(g, t_sorted, map);
            samples = qbl::add_sample_noise(samples, {a.sigma}, derive_seed(seed, 2));
            const auto est = qbl::reconstruct_p3(samples, params);
            const double err = std::pow(l2_distance_periodic(g, est), 2);
            mean += err / static_cast<double>(a.trials);
            t.rows.push_back({std::to_string(n), std::to_string(trial), std::to_string(seed.value),
                              std::to_string(est.k0()), io::format_double(err)});
        }
        std::printf("N=%zu mean_sq_error=%.6e\n", n, mean);
    }
    if (!a.out.empty()) io::write_results_csv(a.out, t);
    return 0;
}

int run_experiment_cmd(const ExperimentArgs& a) {
    harness::ExperimentSpec spec = harness::spec_from_json(io::read_json(a.spec));
    if (a.seed) spec.seed = RngSeed{*a.seed};
    if (a.threads) spec.threads = *a.threads;
    spec = spec.with_profile(harness::parse_profile(a.profile));
    const auto progress = [&](const harness::TrialRecord& r) {
        if (a.quiet) return;
        std::fprintf(stderr, "%s N=%zu trial=%zu E=%.4e n_delta=%zu reversed=%d %.0fms\n",
                     harness::to_string(r.setting).c_str(), r.n, r.trial, r.error, r.n_delta, r.reversed ? 1 : 0,
                     r.wall_ms);
    };
    const auto res = harness::run_experiment(spec, progress);
    io::write_results_csv(a.out, harness::to_csv(res));
    const fs::path summary = a.summary.empty() ? fs::path(a.out).replace_extension(".summary.json") : fs::path(a.summary);
    io::write_json(summary, harness::summary_json(spec, res));
    for (const auto& g : res.aggregates)
        std::printf("%-22s N=%-6zu mean_E=%.4e median_E=%.4e reversed=%zu/%zu\n", harness::to_string(g.setting).c_str(),
                    g.n, g.mean_error, g.median_error, g.reversed_runs, g.runs);
    std::cout << "wrote " << a.out << " and " << summary.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tomographic reconstruction from projections at unknown angles"};
    app.require_subcommand(1);

    PhantomArgs pa;
    auto* phantom_cmd = app.add_subcommand("phantom", "Write a built-in phantom image");
    phantom_cmd->add_option("--out", pa.out, "Output image header (.json)")->required();
    phantom_cmd->add_option("--grid", pa.grid, "Grid size")->check(CLI::Range(2, 4096));
    phantom_cmd->add_option("--kind", pa.kind, "gaussian or disc")->check(CLI::IsMember({"gaussian", "disc"}));
    phantom_cmd->add_option("--radius", pa.radius, "Disc radius");

    ProjectArgs pr;
    auto* project_cmd = app.add_subcommand("project", "Radon projections at random anchored angles");
    project_cmd->add_option("--image", pr.image)->required();
    project_cmd->add_option("--angles-seed", pr.angles_seed);
    project_cmd->add_option("--n", pr.n)->check(CLI::PositiveNumber);
    project_cmd->add_option("--bins", pr.bins)->check(CLI::Range(2, 1 << 16));
    project_cmd->add_option("--noise", pr.noise, "Noise sigma relative to mean |projection|");
    project_cmd->add_option("--noise-seed", pr.noise_seed);
    project_cmd->add_option("--out", pr.out)->required();

    ReconstructArgs ra;
    auto* recon_cmd = app.add_subcommand("reconstruct", "Reconstruct an image from a sinogram");
    recon_cmd->add_option("--sinogram", ra.sinogram)->required();
    recon_cmd->add_option("--order", ra.order, "nn, file or true")->check(CLI::IsMember({"nn", "file", "true"}));
    recon_cmd->add_option("--order-file", ra.order_file, "Permutation JSON for --order file");
    recon_cmd->add_option("--nu0", ra.nu0, "Cutoff radius or 'auto'");
    recon_cmd->add_option("--k0", ra.k0, "Ring bandwidth or 'auto'");
    recon_cmd->add_option("--m", ra.m, "Spoke count (0: auto)");
    recon_cmd->add_option("--grid", ra.grid)->check(CLI::Range(2, 4096));
    recon_cmd->add_option("--oversample", ra.oversample)->check(CLI::Range(1, 64));
    recon_cmd->add_option("--pixel-size", ra.pixel_size, "Output pixel size (0: span the support)");
    recon_cmd->add_option("--out", ra.out)->required();

    FstArgs fa;
    auto* fst_cmd = app.add_subcommand("fst-check", "Compare projection spectra with 2D transform slices");
    fst_cmd->add_option("--image", fa.image)->required();
    fst_cmd->add_option("--angles", fa.angles)->check(CLI::PositiveNumber);
    fst_cmd->add_option("--bins", fa.bins, "Offset bins (0: image width)");

    OrderArgs oa;
    auto* order_cmd = app.add_subcommand("order", "Nearest-neighbour ordering of a sinogram");
    order_cmd->add_option("--sinogram", oa.sinogram)->required();
    order_cmd->add_option("--start", oa.start, "0-based starting row");
    order_cmd->add_option("--out", oa.out)->required();

    PerturbArgs pe;
    auto* perturb_cmd = app.add_subcommand("perturb", "Shuffle, shift or synthesize orderings");
    perturb_cmd->add_option("--perm", pe.perm, "Input permutation (default: identity of --n)");
    perturb_cmd->add_option("--n", pe.n);
    perturb_cmd->add_option("--shuffle", pe.shuffle, "Positions to re-permute");
    perturb_cmd->add_option("--shift", pe.shift, "START LEN INSERT_AT (1-based)")->expected(3);
    perturb_cmd->add_option("--synth", pe.synth, "DELTA_BAR N_DELTA")->expected(2);
    perturb_cmd->add_option("--seed", pe.seed);
    perturb_cmd->add_option("--out", pe.out)->required();

    GoodnessArgs ga;
    auto* goodness_cmd = app.add_subcommand("goodness", "Count positions displaced by more than delta_bar");
    goodness_cmd->add_option("--perm", ga.perm)->required();
    goodness_cmd->add_option("--delta-bar", ga.delta_bar)->check(CLI::NonNegativeNumber);

    SweepArgs sa;
    auto* sweep_cmd = app.add_subcommand("qbl-sweep", "1D reconstruction error versus N");
    sweep_cmd->add_option("--n-list", sa.n_list);
    sweep_cmd->add_option("--trials", sa.trials)->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--gamma", sa.gamma);
    sweep_cmd->add_option("--d", sa.d);
    sweep_cmd->add_option("--k1", sa.k1);
    sweep_cmd->add_option("--kmax", sa.kmax, "Highest harmonic of the test signal");
    sweep_cmd->add_option("--sigma", sa.sigma, "Sample noise standard deviation");
    sweep_cmd->add_flag("--synthetic-order", sa.synthetic_order, "Misorder with a synthetic good map");
    sweep_cmd->add_option("--seed", sa.seed);
    sweep_cmd->add_option("--out", sa.out, "Optional CSV output");

    ExperimentArgs ea;
    auto* exp_cmd = app.add_subcommand("experiment", "Run the settings sweep from a JSON spec");
    exp_cmd->add_option("--spec", ea.spec)->required();
    exp_cmd->add_option("--out", ea.out)->required();
    exp_cmd->add_option("--summary", ea.summary, "Summary JSON (default: --out with extension .summary.json)");
    exp_cmd->add_option("--profile", ea.profile)->check(CLI::IsMember({"ci", "full"}));
    exp_cmd->add_option("--seed", ea.seed);
    exp_cmd->add_option("--threads", ea.threads);
    exp_cmd->add_flag("--quiet", ea.quiet);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*phantom_cmd) return run_phantom(pa);
        if (*project_cmd) return run_project(pr);
        if (*recon_cmd) return run_reconstruct(ra);
        if (*fst_cmd) return run_fst(fa);
        if (*order_cmd) return run_order(oa);
        if (*perturb_cmd) return run_perturb(pe);
        if (*goodness_cmd) return run_goodness(ga);
        if (*sweep_cmd) return run_qbl_sweep(sa);
        if (*exp_cmd) return run_experiment_cmd(ea);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// genbasis: build generalized bases from total sets of vectors and run the entropy,
// representation and crossing-detection analyses on them.
//
// Exit codes: 0 ok, 1 input or validation error, 2 tie-degenerate partition,
// 3 numerical residual failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "genbasis/genbasis.hpp"
#include "genbasis/io.hpp"
#include "report.hpp"

using namespace genbasis;
using cli::Cell;
using cli::Report;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_degenerate = 2;
constexpr int exit_residual = 3;

struct Common {
    std::string format = "table";
    int precision = 3;
};

struct BasisSource {
    std::string example;  // "I", "II" or empty
    std::string input;
    bool fourier = false;
};

struct NamedBasis {
    std::string name;
    GeneralizedBasis gb;
    std::vector<std::string> labels;
};

cli::Format parse_format(const std::string& s) {
    if (s == "csv") return cli::Format::Csv;
    if (s == "json") return cli::Format::Json;
    return cli::Format::Table;
}

std::string label(const NamedBasis& b, std::size_t i) {
    return i < b.labels.size() ? b.labels[i] : std::to_string(i + 1);
}

NamedBasis example_basis(const std::string& which) {
    if (which == "I" || which == "example-I")
        return {"example-I", generalized_basis(builtin::three_state_prebasis()), {}};
    if (which == "II" || which == "example-II")
        return {"example-II", generalized_basis(builtin::four_state_prebasis()), {}};
    throw ValidationError("unknown example '" + which + "' (expected I or II)");
}

NamedBasis load_basis(const BasisSource& src) {
    NamedBasis b;
    if (!src.input.empty()) {
        const io::PreBasisFile f = io::prebasis_from_json(io::parse_file(src.input));
        for (const auto& w : f.warnings) std::cerr << "warning: " << w << "\n";
        b = {src.input, generalized_basis(f.prebasis()), f.labels};
    } else {
        b = example_basis(src.example.empty() ? "I" : src.example);
    }
    if (src.fourier) {
        b.gb = conjugate_basis(b.gb, fourier_matrix(static_cast<Eigen::Index>(b.gb.d)));
        b.name += " (Fourier)";
    }
    return b;
}

void add_basis_source_options(CLI::App* app, BasisSource& src) {
    app->add_option("--example", src.example, "Built-in pre-basis")->check(CLI::IsMember({"I", "II"}));
    app->add_option("--input", src.input, "Pre-basis JSON file")->check(CLI::ExistingFile);
    app->add_flag("--fourier", src.fourier, "Conjugate the basis by the Fourier matrix");
}

void add_matrix(Report& r, const std::string& name, const CMatrix& m) {
    std::vector<std::string> cols{"row"};
    for (Eigen::Index c = 0; c < m.cols(); ++c) cols.push_back("c" + std::to_string(c + 1));
    auto& s = r.add(name, cols);
    for (Eigen::Index row = 0; row < m.rows(); ++row) {
        std::vector<Cell> cells{static_cast<long long>(row + 1)};
        for (Eigen::Index c = 0; c < m.cols(); ++c) cells.emplace_back(m(row, c));
        s.row(std::move(cells));
    }
}

std::vector<double> lambda_grid(double lo, double hi, int steps) {
    if (steps < 1) throw ValidationError("--lambda-steps must be >= 1");
    if (steps == 1) return {lo};
    if (!(lo < hi)) throw ValidationError("--lambda-min must be below --lambda-max");
    std::vector<double> g;
    for (int k = 0; k < steps; ++k) g.push_back(lo + (hi - lo) * k / (steps - 1));
    return g;
}

// ----------------------------------- basis -----------------------------------

struct BasisArgs {
    BasisSource src;
    std::string export_path;
};

int cmd_basis(const BasisArgs& a, Report& r) {
    const NamedBasis b = load_basis(a.src);
    for (std::size_t i = 0; i < b.gb.n; ++i) add_matrix(r, "sigma(" + label(b, i) + ")", b.gb[i]);
    const auto red = redundancy_indices(b.gb.n, b.gb.d);
    auto& s = r.keys("summary");
    s.row({"basis", b.name});
    s.row({"d", static_cast<long long>(b.gb.d)});
    s.row({"n", static_cast<long long>(b.gb.n)});
    s.row({"weight d/n", b.gb.weight()});
    s.row({"resolution residual", b.gb.resolution_residual});
    s.row({"redundancy index", red.ratio});
    s.row({"entropic redundancy index", red.entropic});
    r.notes.push_back("resolution residual = max |(d/n) sum sigma(i) - 1|");
    if (!a.export_path.empty()) {
        std::ofstream out(a.export_path);
        if (!out) throw io::ParseError("cannot write '" + a.export_path + "'");
        out << io::prebasis_to_json(b.gb.source, b.labels).dump(2) << "\n";
    }
    return exit_ok;
}

// ---------------------------------- entropy ----------------------------------

struct EntropyArgs {
    BasisSource src;
    std::string state = "x0";
    std::string matrix;
};

int cmd_entropy(const EntropyArgs& a, Report& r) {
    const NamedBasis b = load_basis(a.src);
    const auto d = static_cast<Eigen::Index>(b.gb.d);
    CMatrix theta;
    std::string what;
    if (!a.matrix.empty()) {
        theta = io::matrix_from_json(io::parse_file(a.matrix), "matrix");
        what = a.matrix;
    } else if (a.state == "mixed") {
        theta = CMatrix::Identity(d, d) / static_cast<double>(d);
        what = "1/d";
    } else {
        if (a.state.size() < 2 || a.state[0] != 'x') throw ValidationError("--state expects x<k> or mixed");
        const int k = std::stoi(a.state.substr(1));
        if (k < 0 || k >= d) throw ValidationError("--state index out of range");
        theta = CMatrix::Zero(d, d);
        theta(k, k) = 1.0;
        what = "|X;" + std::to_string(k) + "><X;" + std::to_string(k) + "|";
    }
    const auto s = pseudo_probabilities(theta, b.gb);
    const auto caps = pseudo_probability_caps(b.gb);
    auto& t = r.add("pseudo-probabilities", {"i", "s(i)", "cap"});
    for (std::size_t i = 0; i < s.size(); ++i) t.row({label(b, i), s[i], caps[i]});
    auto& k = r.keys("summary");
    k.row({"operator", what});
    k.row({"basis", b.name});
    k.row({"kind", s.kind == SubjectKind::DensityMatrix ? "density matrix" : "hermitian"});
    k.row({"sum", s.sum});
    const auto red = redundancy_indices(b.gb.n, b.gb.d);
    if (s.kind == SubjectKind::DensityMatrix) {
        k.row({"E_n", shannon_entropy(s)});
        k.row({"lower bound log n - log d", red.entropic});
        k.row({"upper bound log n", std::log(static_cast<double>(b.gb.n))});
        k.row({"E_vN", von_neumann_entropy(theta)});
    } else {
        r.notes.push_back("operator is not a density matrix; entropies omitted");
    }
    return exit_ok;
}

// --------------------------------- represent ---------------------------------

struct RepresentArgs {
    BasisSource src;
    std::string vector;
    std::uint64_t seed = 1;
    double mu = 0.5;
    int trials = 1000;
    int show = 5;
};

int cmd_represent(const RepresentArgs& a, Report& r) {
    const NamedBasis b = load_basis(a.src);
    CVector v = builtin::probe_vector();
    if (!a.vector.empty()) {
        v = io::vector_from_json(io::parse_file(a.vector), "vector");
        if (v.norm() == 0.0) throw ValidationError("vector: zero vector");
        v /= v.norm();
    }
    if (v.size() != static_cast<Eigen::Index>(b.gb.d)) throw ValidationError("vector dimension differs from the basis");
    const Expansion e = expand(v, b.gb);
    std::vector<std::string> cols{"i"};
    for (Eigen::Index k = 0; k < v.size(); ++k) cols.push_back("V(i)_" + std::to_string(k));
    auto& comp = r.add("components", cols);
    for (std::size_t i = 0; i < e.components.size(); ++i) {
        std::vector<Cell> row{label(b, i)};
        for (Eigen::Index k = 0; k < v.size(); ++k) row.emplace_back(e.components[i](k));
        comp.row(std::move(row));
    }
    const auto suite = noise_trial_suite(v, b.gb, a.mu, static_cast<std::size_t>(a.trials), a.seed);
    auto& t = r.add("trials", {"trial", "eps", "eps_D", "eps_ND", "eps_orth"});
    double split = 0.0;
    for (std::size_t k = 0; k < suite.trials.size(); ++k) {
        const auto& tr = suite.trials[k];
        const auto& e0 = tr.bases[0];
        split = std::max(split, std::abs(e0.eps * e0.eps - e0.eps_diag - e0.eps_offdiag));
        if (static_cast<int>(k) < a.show) t.row({static_cast<long long>(k + 1), e0.eps, e0.eps_diag, e0.eps_offdiag, tr.eps_orth});
    }
    auto& s = r.keys("summary");
    s.row({"trials", static_cast<long long>(a.trials)});
    s.row({"mu", a.mu});
    s.row({"seed", std::to_string(a.seed)});
    s.row({"mean eps", suite.basis_stats[0].mean});
    s.row({"stddev eps", suite.basis_stats[0].stddev});
    s.row({"mean eps_orth", suite.orth_stats.mean});
    s.row({"stddev eps_orth", suite.orth_stats.stddev});
    s.row({"win rate eps < eps_orth", suite.basis_stats[0].win_rate});
    s.row({"max |eps^2 - eps_D - eps_ND|", split});
    return exit_ok;
}

// ---------------------------------- detect -----------------------------------

struct DetectArgs {
    std::string builtin;
    std::string family;
    std::string basis = "example-I";
    std::string input;
    double D = 1.0;
    double S = 0.0;
    std::optional<double> lambda_min, lambda_max;
    int lambda_steps = 9;
    bool grid = false;
    std::optional<double> beta;
    bool scan = false;
};

int cmd_detect(const DetectArgs& a, Report& r) {
    NamedBasis b;
    if (!a.input.empty()) b = load_basis({"", a.input, false});
    else b = example_basis(a.basis);

    std::optional<AffineHamiltonianFamily> fam;
    bool noisy = false;
    if (!a.family.empty()) {
        fam = io::family_from_json(io::parse_file(a.family));
    } else if (a.builtin == "two-level-noisy") {
        fam = noisy_two_level_coupling_family(a.S, a.D);
        noisy = true;
    } else if (a.builtin.empty() || a.builtin == "two-level") {
        fam = two_level_coupling_family();
    } else {
        throw ValidationError("unknown --builtin '" + a.builtin + "'");
    }
    const double lo = a.lambda_min.value_or(fam->lambda_min());
    const double hi = a.lambda_max.value_or(fam->lambda_max());
    const AffineHamiltonianFamily f = fam->with_range(lo, hi);
    const bool in_units = noisy && a.D != 0.0;

    const auto coeffs = s_affine_coefficients(f, b.gb);
    auto& c = r.add("coefficients s(i|lambda) = a + b*lambda", {"i", "a", "b"});
    for (std::size_t i = 0; i < coeffs.size(); ++i) c.row({label(b, i), coeffs[i].a, coeffs[i].b});

    ComonotonicityPartition p;
    if (a.grid) {
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw ValidationError("--grid-fallback needs finite --lambda-min and --lambda-max");
        p = partition_by_grid(f, b.gb, lo, hi);
    } else {
        p = comonotonicity_partition(coeffs, lo, hi);
    }
    std::vector<std::string> xcols{"k", "lambda"};
    if (in_units) xcols.push_back("lambda/D");
    auto& x = r.add("crossings", xcols);
    for (std::size_t k = 0; k < p.crossings.size(); ++k) {
        std::vector<Cell> row{static_cast<long long>(k + 1), p.crossings[k]};
        if (in_units) row.emplace_back(p.crossings[k] / a.D);
        x.row(std::move(row));
    }
    std::vector<std::string> icols{"lo", "hi"};
    if (in_units) {
        icols.push_back("lo/D");
        icols.push_back("hi/D");
    }
    icols.push_back("location index");
    icols.push_back("degenerate");
    auto& iv = r.add("intervals", icols);
    for (const auto& in : p.intervals) {
        std::vector<Cell> row{in.lo, in.hi};
        if (in_units) {
            row.emplace_back(in.lo / a.D);
            row.emplace_back(in.hi / a.D);
        }
        row.emplace_back(to_string(in.index));
        row.emplace_back(std::string(in.degenerate ? "yes" : "no"));
        iv.row(std::move(row));
    }
    auto& s = r.keys("summary");
    s.row({"family", f.description()});
    s.row({"basis", b.name});
    s.row({"method", a.grid ? "grid + bisection" : "exact pairwise"});
    if (noisy) {
        s.row({"S", a.S});
        s.row({"D", a.D});
    }

    if (a.beta || a.scan) {
        const double glo = a.lambda_min.value_or(-0.4), ghi = a.lambda_max.value_or(0.4);
        const auto grid = lambda_grid(glo, ghi, a.lambda_steps);
        if (a.beta) {
            std::vector<std::string> cols{"lambda", "Z", "<e>"};
            for (std::size_t i = 0; i < b.gb.n; ++i) cols.push_back("s_E(" + label(b, i) + ")");
            auto& t = r.add("thermal (beta = " + cli::fixed(*a.beta, 3) + ")", cols);
            for (double l : grid) {
                const auto q = thermal_quantities(f, b.gb, *a.beta, l);
                std::vector<Cell> row{l, q.partition, q.mean_energy};
                for (double v : q.s) row.emplace_back(v);
                t.row(std::move(row));
            }
        }
        if (a.scan) {
            const std::vector<GeneralizedBasis> bases{b.gb};
            auto& t = r.add("entropy scan", {"lambda", "E_vN/log d", "E_n/log n"});
            for (const auto& row : entropy_scan(f, bases, grid)) {
                if (row.clean) t.row({row.lambda, row.clean->von_neumann, row.clean->generalized[0]});
                else t.row({row.lambda, std::monostate{}, std::monostate{}});
            }
        }
    }
    if (p.degenerate()) {
        r.notes.push_back("some interval carries a tie between pseudo-probabilities");
        return exit_degenerate;
    }
    return exit_ok;
}

// --------------------------------- reproduce ---------------------------------

struct ReproduceArgs {
    int table = 0;
    std::uint64_t seed = 1;
    double mu = 0.5;
    int trials = 1000;
    int rows = 5;
    int draws = 200;
};

int reproduce_table1(const ReproduceArgs& a, Report& r) {
    const std::vector<GeneralizedBasis> bases{generalized_basis(builtin::three_state_prebasis()),
                                              generalized_basis(builtin::four_state_prebasis())};
    const auto suite = noise_trial_suite(builtin::probe_vector(), bases, a.mu, static_cast<std::size_t>(a.trials), a.seed);
    auto& t = r.add("table 1", {"eps3", "eps3D", "eps3ND", "eps4", "eps4D", "eps4ND", "eps_orth"});
    for (std::size_t k = 0; k < suite.trials.size() && static_cast<int>(k) < a.rows; ++k) {
        const auto& tr = suite.trials[k];
        t.row({tr.bases[0].eps, tr.bases[0].eps_diag, tr.bases[0].eps_offdiag, tr.bases[1].eps, tr.bases[1].eps_diag,
               tr.bases[1].eps_offdiag, tr.eps_orth});
    }
    auto& s = r.keys("trend");
    s.row({"trials", static_cast<long long>(a.trials)});
    s.row({"mu", a.mu});
    s.row({"seed", std::to_string(a.seed)});
    s.row({"mean eps3", suite.basis_stats[0].mean});
    s.row({"mean eps4", suite.basis_stats[1].mean});
    s.row({"mean eps_orth", suite.orth_stats.mean});
    s.row({"stddev eps3", suite.basis_stats[0].stddev});
    s.row({"stddev eps4", suite.basis_stats[1].stddev});
    s.row({"stddev eps_orth", suite.orth_stats.stddev});
    s.row({"win rate eps3 < eps_orth", suite.basis_stats[0].win_rate});
    s.row({"win rate eps4 < eps_orth", suite.basis_stats[1].win_rate});
    const bool ok = suite.basis_stats[0].mean < suite.orth_stats.mean && suite.basis_stats[1].mean < suite.orth_stats.mean;
    s.row({"mean eps3, eps4 < mean eps_orth", std::string(ok ? "yes" : "no")});
    return exit_ok;
}

int reproduce_table2(const ReproduceArgs& a, Report& r) {
    const std::vector<GeneralizedBasis> bases{generalized_basis(builtin::three_state_prebasis()),
                                              generalized_basis(builtin::four_state_prebasis())};
    const auto family = two_level_coupling_family();
    const auto lambdas = lambda_grid(-0.4, 0.4, 9);
    // realization 0 of the same stream the summary pools
    UniformNoise noise(derive_seed(a.seed, 0), a.mu);
    const auto diag = noise.draw(2);
    const auto rows = entropy_scan(family, bases, lambdas, family.with_diagonal_noise(diag));
    auto& t = r.add("table 2", {"lambda", "E_vN/log2", "E3/log3", "E4/log4", "dE_vN/E_vN", "dE3/E3", "dE4/E4"});
    for (const auto& row : rows) {
        std::vector<Cell> cells{row.lambda};
        if (row.clean) {
            cells.emplace_back(row.clean->von_neumann);
            for (double g : row.clean->generalized) cells.emplace_back(g);
        } else {
            cells.insert(cells.end(), 3, std::monostate{});
        }
        const auto dev = row.relative_deviation();
        if (dev.empty()) cells.insert(cells.end(), 3, std::monostate{});
        else
            for (double x : dev) cells.emplace_back(x);
        t.row(std::move(cells));
    }
    auto& n = r.keys("noise realization");
    n.row({"N1", diag[0]});
    n.row({"N2", diag[1]});
    n.row({"seed", std::to_string(a.seed)});

    const auto sum = entropy_noise_summary(family, bases, lambdas, a.mu, static_cast<std::size_t>(a.draws), a.seed);
    auto& m = r.keys("noise statistics");
    m.row({"draws", static_cast<long long>(sum.draws)});
    m.row({"rows used", static_cast<long long>(sum.rows_used)});
    m.row({"rows skipped", static_cast<long long>(sum.rows_skipped)});
    m.row({"median |dE_vN/E_vN|", sum.median_abs_deviation[0]});
    m.row({"median |dE3/E3|", sum.median_abs_deviation[1]});
    m.row({"median |dE4/E4|", sum.median_abs_deviation[2]});
    m.row({"ratio vN/E3", sum.median_abs_deviation[0] / sum.median_abs_deviation[1]});
    m.row({"ratio vN/E4", sum.median_abs_deviation[0] / sum.median_abs_deviation[2]});
    r.notes.push_back("noise columns use one seeded draw of diag(N1, N2) ~ U[-mu, mu]");
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized bases from total sets of vectors"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    app.add_option("--precision", common.precision, "Decimals in table and CSV output")
        ->check(CLI::Range(1, 15))
        ->capture_default_str();

    BasisArgs basis;
    auto* c_basis = app.add_subcommand("basis", "Print the generalized basis sigma(i)");
    add_basis_source_options(c_basis, basis.src);
    c_basis->add_option("--export", basis.export_path, "Write the pre-basis to a JSON file");

    EntropyArgs entropy;
    auto* c_entropy = app.add_subcommand("entropy", "Pseudo-probabilities and Shannon entropy of an operator");
    add_basis_source_options(c_entropy, entropy.src);
    c_entropy->add_option("--state", entropy.state, "x<k> for |X;k><X;k|, or mixed")->capture_default_str();
    c_entropy->add_option("--matrix", entropy.matrix, "Hermitian matrix JSON file")->check(CLI::ExistingFile);

    RepresentArgs represent;
    auto* c_repr = app.add_subcommand("represent", "Expand a vector and run noisy reconstructions");
    add_basis_source_options(c_repr, represent.src);
    c_repr->add_option("--vector", represent.vector, "Vector JSON file (array of [re, im])")->check(CLI::ExistingFile);
    c_repr->add_option("--seed", represent.seed)->capture_default_str();
    c_repr->add_option("--mu", represent.mu, "Noise half-width")->check(CLI::PositiveNumber)->capture_default_str();
    c_repr->add_option("--trials", represent.trials)->check(CLI::PositiveNumber)->capture_default_str();
    c_repr->add_option("--show", represent.show, "Trial rows to print")->check(CLI::NonNegativeNumber)->capture_default_str();

    DetectArgs detect;
    auto* c_detect = app.add_subcommand("detect", "Comonotonicity partition of an affine Hamiltonian family");
    c_detect->add_option("--builtin", detect.builtin, "Built-in family")->check(CLI::IsMember({"two-level", "two-level-noisy"}));
    c_detect->add_option("--family", detect.family, "Family JSON file")->check(CLI::ExistingFile);
    c_detect->add_option("--basis", detect.basis)->check(CLI::IsMember({"example-I", "example-II", "I", "II"}))->capture_default_str();
    c_detect->add_option("--input", detect.input, "Pre-basis JSON file instead of --basis")->check(CLI::ExistingFile);
    c_detect->add_option("--D", detect.D, "Noise difference (N1 - N2)/2")->capture_default_str();
    c_detect->add_option("--S", detect.S, "Noise mean (N1 + N2)/2")->capture_default_str();
    c_detect->add_option("--lambda-min", detect.lambda_min);
    c_detect->add_option("--lambda-max", detect.lambda_max);
    c_detect->add_option("--lambda-steps", detect.lambda_steps)->check(CLI::PositiveNumber)->capture_default_str();
    c_detect->add_flag("--grid-fallback", detect.grid, "Locate crossings by grid scan and bisection");
    c_detect->add_option("--beta", detect.beta, "Also tabulate thermal quantities")->check(CLI::PositiveNumber);
    c_detect->add_flag("--scan", detect.scan, "Also tabulate normalized entropies");
    c_detect->get_option("--builtin")->excludes("--family");
    c_detect->get_option("--basis")->excludes("--input");

    ReproduceArgs repro;
    auto* c_repro = app.add_subcommand("reproduce", "Regenerate the reference tables");
    c_repro->add_option("--table", repro.table)->required()->check(CLI::IsMember({1, 2}));
    c_repro->add_option("--seed", repro.seed)->capture_default_str();
    c_repro->add_option("--mu", repro.mu)->check(CLI::PositiveNumber)->capture_default_str();
    c_repro->add_option("--trials", repro.trials, "Table 1 trials for the trend line")->check(CLI::PositiveNumber)->capture_default_str();
    c_repro->add_option("--rows", repro.rows, "Table 1 rows to print")->check(CLI::NonNegativeNumber)->capture_default_str();
    c_repro->add_option("--draws", repro.draws, "Table 2 noise draws for the statistics")->check(CLI::PositiveNumber)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    Report report;
    int code = exit_ok;
    try {
        if (c_basis->parsed()) code = cmd_basis(basis, report);
        else if (c_entropy->parsed()) code = cmd_entropy(entropy, report);
        else if (c_repr->parsed()) code = cmd_represent(represent, report);
        else if (c_detect->parsed()) code = cmd_detect(detect, report);
        else if (c_repro->parsed()) code = repro.table == 1 ? reproduce_table1(repro, report) : reproduce_table2(repro, report);
    } catch (const ResidualError& e) {
        std::cerr << "error: " << e.what() << " (residual " << e.residual() << ")\n";
        return exit_residual;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    cli::emit(report, parse_format(common.format), common.precision, std::cout);
    return code;
}

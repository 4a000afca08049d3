#include <CLI11.hpp>

#include <complex>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "sphereval/counterexample.hpp"
#include "sphereval/json_io.hpp"
#include "sphereval/suite.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using namespace sphereval;
using Eigen::VectorXd;

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open output file " + path);
    return file;
}

void meta_line(std::ostream& os, const std::string& grid, std::uint64_t seed) {
    os << "# " << kVersion << "," << grid << "," << seed << "\n";
}

VectorXd parse_point(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    VectorXd x(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) x(i) = vals[i];
    return x;
}

int check_suite(const std::string& which, const Valuation& mu, const QuadratureGrid& grid,
                const std::string& grid_spec, std::ostream& os) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> lam(1.0, 3.0);
    auto rand_unit = [&](int n) {
        VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = nd(rng);
        return v.normalized().eval();
    };
    auto rand_field = [&](int n) {
        std::vector<ScalarField> fs;
        for (int i = 0; i < 2; ++i) fs.push_back(disk_support(rand_unit(n), lam(rng)));
        return (rng() & 1) ? meet(fs) : join(fs);
    };

    const int n = grid.ambient_dim;
    bool all_pass = true;
    os << "case,residual,tol,pass\n";
    auto emit = [&](const std::string& name, double residual, double tol, bool pass) {
        os << name << "," << residual << "," << tol << "," << (pass ? 1 : 0) << "\n";
        all_pass = all_pass && pass;
    };

    if (which == "valuation-property") {
        for (int i = 0; i < 10; ++i) {
            const CheckReport r =
                check_valuation_property(mu, rand_field(n), rand_field(n), grid, 1e-6);
            emit("pair" + std::to_string(i), r.residual, r.tol * r.scale, r.pass);
        }
    } else if (which == "invariance") {
        for (int i = 0; i < 10; ++i) {
            const CheckReport r = check_dual_invariance(mu, rand_field(n), rand_unit(n), grid, 1e-5);
            emit("shift" + std::to_string(i), r.residual, r.tol * r.scale, r.pass);
        }
    } else if (which == "degree") {
        const std::vector<double> ts = {0.5, 1.0, 1.5, 2.0, 2.5};
        for (int i = 0; i < 5; ++i) {
            const DegreeFit fit = fit_degree(mu, rand_field(n), ts, grid);
            const double tol = 1e-8 * std::max(1.0, fit.scale);
            emit("field" + std::to_string(i), fit.truncation_residual, tol,
                 fit.truncation_residual <= tol);
        }
    } else if (which == "pde") {
        const auto* t2 = std::get_if<Theta2>(&mu.form);
        if (!t2) throw std::invalid_argument("pde suite needs a theta2 valuation");
        for (int i = 0; i < 50; ++i) {
            const VectorXd x = rand_unit(n);
            const double r = pde_residual(t2->phi, x).maxCoeff();
            emit("point" + std::to_string(i), r, 1e-4, r <= 1e-4);
        }
    } else {
        throw CLI::ValidationError("--suite", "unknown suite " + which);
    }
    meta_line(os, grid_spec, grid.seed);
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"valuations on Lipschitz functions on the sphere"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string grid_spec = "icosphere:5", out_path, field_path, spec_path, body_path, point_csv;
    std::string suite_name = "valuation-property";
    int n = 3;
    double delta = 0.0, p = 7.0 / 6.0;
    long kmin = 32, kmax = 1024;

    auto* grid_cmd = app.add_subcommand("grid", "quadrature grids");
    auto* grid_dump = grid_cmd->add_subcommand("dump", "write grid nodes and weights as CSV");
    grid_dump->add_option("--grid", grid_spec);
    grid_dump->add_option("--n", n);
    grid_dump->add_option("--out", out_path);

    auto* field_cmd = app.add_subcommand("field", "scalar fields");
    auto* field_eval = field_cmd->add_subcommand("eval", "evaluate a field at a point");
    field_eval->add_option("--field", field_path)->required();
    field_eval->add_option("--x", point_csv)->required();
    auto* field_norms = field_cmd->add_subcommand("norms", "sup norm and Lipschitz estimate");
    field_norms->add_option("--field", field_path)->required();
    field_norms->add_option("--grid", grid_spec);
    field_norms->add_option("--n", n);
    field_norms->add_option("--out", out_path);

    auto* body_cmd = app.add_subcommand("body", "convex bodies");
    auto* body_measure = body_cmd->add_subcommand("measure", "surface area measure as CSV");
    body_measure->add_option("--body", body_path)->required();
    body_measure->add_option("--out", out_path);
    auto* body_pair = body_cmd->add_subcommand("pair", "pair the area measure with x1^3");
    body_pair->add_option("--body", body_path)->required();

    auto* val_cmd = app.add_subcommand("valuation", "valuation functionals");
    auto* val_eval = val_cmd->add_subcommand("eval", "evaluate a valuation on a field");
    val_eval->add_option("--spec", spec_path)->required();
    val_eval->add_option("--field", field_path)->required();
    val_eval->add_option("--grid", grid_spec);
    val_eval->add_option("--n", n);
    auto* val_check = val_cmd->add_subcommand("check", "run a checker battery");
    val_check->add_option("--suite", suite_name);
    val_check->add_option("--spec", spec_path)->required();
    val_check->add_option("--grid", grid_spec);
    val_check->add_option("--n", n);
    val_check->add_option("--out", out_path);

    auto* ce_cmd = app.add_subcommand("counterexample", "the divergence construction");
    auto* ce_sweep = ce_cmd->add_subcommand("sweep", "nu(f_k) and norm decay over k");
    ce_sweep->add_option("--n", n);
    ce_sweep->add_option("--p", p);
    std::string delta_opt = "auto";
    ce_sweep->add_option("--delta", delta_opt);
    ce_sweep->add_option("--kmin", kmin);
    ce_sweep->add_option("--kmax", kmax);
    ce_sweep->add_option("--grid", grid_spec);
    ce_sweep->add_option("--out", out_path);
    auto* ce_verify = ce_cmd->add_subcommand("verify-estimate", "check the cap estimate");
    ce_verify->add_option("--n", n);
    ce_verify->add_option("--delta", delta)->required();
    auto* ce_delta = ce_cmd->add_subcommand("find-delta", "cap threshold for the estimate");
    ce_delta->add_option("--n", n);

    auto* suite_cmd = app.add_subcommand("suite", "batteries");
    auto* suite_all = suite_cmd->add_subcommand("all", "run the full acceptance battery");
    suite_all->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::ofstream file;
        if (grid_dump->parsed()) {
            const QuadratureGrid g = parse_grid_spec(grid_spec, n);
            std::ostream& os = open_out(file, out_path);
            g.write_csv(os);
            meta_line(os, grid_spec, g.seed);
        } else if (field_eval->parsed()) {
            const ScalarField f = parse_field(load_json(field_path));
            std::cout.precision(17);
            std::cout << eval(f, parse_point(point_csv)) << "\n";
        } else if (field_norms->parsed()) {
            const ScalarField f = parse_field(load_json(field_path));
            const QuadratureGrid g = parse_grid_spec(grid_spec, f.ambient_dim());
            TieCounter ties;
            std::ostream& os = open_out(file, out_path);
            os.precision(17);
            os << "sup_norm,lip_est,ties\n";
            os << sup_norm(f, g) << "," << lip_est(f, g, &ties) << "," << ties.ties << "\n";
            meta_line(os, grid_spec, g.seed);
        } else if (body_measure->parsed()) {
            const AreaMeasure s = area_measure(parse_body(load_json(body_path)));
            std::ostream& os = open_out(file, out_path);
            s.write_csv(os);
            meta_line(os, "-", 0);
        } else if (body_pair->parsed()) {
            const ConvexBody k = parse_body(load_json(body_path));
            std::cout.precision(17);
            std::cout << area_valuation_eval(
                             [](const Eigen::Ref<const VectorXd>& x) { return std::pow(x(0), 3); },
                             k)
                             .real()
                      << "\n";
        } else if (val_eval->parsed()) {
            const Valuation mu = parse_valuation(load_json(spec_path));
            const ScalarField f = parse_field(load_json(field_path));
            const QuadratureGrid g = parse_grid_spec(grid_spec, f.ambient_dim());
            const std::complex<double> v = valuation_eval(mu, f, g);
            std::cout.precision(17);
            std::cout << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "i\n";
        } else if (val_check->parsed()) {
            const Valuation mu = parse_valuation(load_json(spec_path));
            const QuadratureGrid g = parse_grid_spec(grid_spec, n);
            std::ofstream cf;
            std::ostream& os = open_out(cf, out_path);
            os.precision(17);
            return check_suite(suite_name, mu, g, grid_spec, os);
        } else if (ce_sweep->parsed()) {
            const QuadratureGrid g = parse_grid_spec(grid_spec, n);
            SweepConfig cfg;
            cfg.n = n;
            cfg.p = p;
            cfg.delta = delta_opt == "auto" ? 0.0 : std::stod(delta_opt);
            for (long k = kmin; k <= kmax; k *= 2) cfg.k_values.push_back(k);
            cfg.grid = &g;
            const auto records = sweep(cfg);
            std::ostream& os = open_out(file, out_path);
            os.precision(17);
            os << "k,N,nu_fk,sup_norm,lip_est,d_tau,ties\n";
            for (const auto& r : records)
                os << r.k << "," << r.packing_size << "," << r.nu_fk << "," << r.sup_norm_fk
                   << "," << r.lip_est_fk << "," << r.d_tau_to_zero << "," << r.tie_count << "\n";
            meta_line(os, grid_spec, g.seed);
            if (records.size() >= 4)
                std::cout << "fitted |nu| exponent: " << fit_exponent(records, SweepColumn::Nu)
                          << "\n";
        } else if (ce_verify->parsed()) {
            std::mt19937_64 rng(2024);
            std::normal_distribution<double> nd;
            std::uniform_real_distribution<double> u(delta, 1.0);
            std::vector<VectorXd> xs;
            for (int i = 0; i < 500; ++i) {
                VectorXd dir(n - 1);
                for (int j = 0; j < n - 1; ++j) dir(j) = nd(rng);
                dir.normalize();
                VectorXd xi(n);
                xi(0) = u(rng);
                xi.tail(n - 1) = std::sqrt(1.0 - xi(0) * xi(0)) * dir;
                xs.push_back(xi);
            }
            const EstimateReport rep = verify_estimate(delta, {2, 4, 8, 16}, xs, n);
            std::cout << "worst margin: " << rep.worst_margin
                      << (rep.pass ? " (pass)" : " (FAIL)") << "\n";
            return rep.pass ? 0 : 1;
        } else if (ce_delta->parsed()) {
            std::cout << find_delta(n) << "\n";
        } else if (suite_all->parsed()) {
            const auto cases = run_acceptance();
            std::ofstream sf;
            std::ostream& os = open_out(sf, out_path);
            os << "case,residual,tol,pass\n";
            bool all = true;
            for (const auto& c : cases) {
                os << c.name << "," << c.residual << "," << c.tol << "," << (c.pass ? 1 : 0)
                   << "\n";
                all = all && c.pass;
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
            }
            meta_line(os, grid_spec, 42);
            return all ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

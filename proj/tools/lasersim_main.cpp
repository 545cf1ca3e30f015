#include <complex>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lasersim/run.hpp"

namespace {

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Flat key=value config file; keys are the long option names without the
// leading dashes. Values given on the command line always win.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError("config file not readable: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string entry = trimmed(line);
        if (entry.empty() || entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw CLI::FileError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trimmed(entry.substr(0, eq));
        const std::string value = trimmed(entry.substr(eq + 1));
        CLI::Option* opt = cmd.get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw CLI::FileError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                                 "'");
        if (opt->count() > 0) continue; // the command line already set it
        opt->add_result(value);
        opt->run_callback();
    }
}

int run_simulate(const CLI::App& cmd, const lasersim::RunConfig& base, int dim,
                 const std::vector<std::string>& method_names, const std::string& out) {
    lasersim::RunConfig config = base;
    if (cmd.count("--dim") > 0) config.dim = dim;
    config.methods.clear();
    for (const std::string& name : method_names) {
        if (name == "closed")
            config.methods.insert(lasersim::Method::closed);
        else if (name == "kraus")
            config.methods.insert(lasersim::Method::kraus);
        else if (name == "lindblad")
            config.methods.insert(lasersim::Method::lindblad);
        else {
            std::cerr << "simulate: unknown method '" << name << "'\n";
            return lasersim::kExitConfig;
        }
    }
    return lasersim::cmd_simulate(config, out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laser-channel simulator: closed-form, operator-sum, and ODE evolution "
                 "of a coherent state under gain g and loss kappa"};
    app.require_subcommand(1);

    lasersim::RunConfig sim_config;
    int sim_dim = 0;
    std::vector<std::string> sim_methods{"closed"};
    std::string sim_out = "simulate.csv";
    CLI::App* sim = app.add_subcommand("simulate", "time series of photon number and entropy");
    sim->add_option("--g", sim_config.g, "gain rate (1/time)")->capture_default_str();
    sim->add_option("--kappa", sim_config.kappa, "loss rate (1/time)")->capture_default_str();
    sim->add_option("--z-re", sim_config.z_re, "initial coherent amplitude, real part")
        ->capture_default_str();
    sim->add_option("--z-im", sim_config.z_im, "initial coherent amplitude, imaginary part")
        ->capture_default_str();
    sim->add_option("--t-max", sim_config.t_max, "end of the time grid")->capture_default_str();
    sim->add_option("--t-steps", sim_config.t_steps, "number of grid intervals (rows - 1)")
        ->capture_default_str();
    sim->add_option("--dim", sim_dim, "Fock truncation for matrix methods (default: automatic)");
    sim->add_option("--methods", sim_methods,
                    "any of closed, kraus, lindblad (comma separated)")
        ->delimiter(',')
        ->check(CLI::IsMember({"closed", "kraus", "lindblad"}))
        ->capture_default_str();
    sim->add_option("--out", sim_out, "output CSV path")->capture_default_str();
    std::string sim_cfg;
    sim->add_option("--config", sim_cfg, "flat key=value file; command-line flags win");

    std::vector<double> sweep_g;
    double sweep_kappa = 1.0, sweep_z_re = 4.0, sweep_z_im = 0.0, sweep_t_max = 8.0;
    int sweep_t_steps = 160;
    std::string sweep_out = "sweep.csv";
    CLI::App* sweep = app.add_subcommand(
        "sweep", "closed-form photon number, entropy, and specific entropy per gain rate");
    sweep->add_option("--g", sweep_g, "gain rates, one series each (comma separated)")
        ->delimiter(',');
    sweep->add_option("--kappa", sweep_kappa, "loss rate shared by all series")
        ->capture_default_str();
    sweep->add_option("--z-re", sweep_z_re, "initial coherent amplitude, real part")
        ->capture_default_str();
    sweep->add_option("--z-im", sweep_z_im, "initial coherent amplitude, imaginary part")
        ->capture_default_str();
    sweep->add_option("--t-max", sweep_t_max, "end of the time grid")->capture_default_str();
    sweep->add_option("--t-steps", sweep_t_steps, "number of grid intervals (rows - 1)")
        ->capture_default_str();
    sweep->add_option("--out", sweep_out, "output CSV path")->capture_default_str();
    std::string sweep_cfg;
    sweep->add_option("--config", sweep_cfg, "flat key=value file; command-line flags win");

    std::string profile = "default";
    CLI::App* verify = app.add_subcommand("verify", "run the full cross-validation suite");
    verify->add_option("--profile", profile, "tolerance profile")
        ->check(CLI::IsMember({"default", "strict"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (!sim_cfg.empty()) apply_config_file(*sim, sim_cfg);
        if (!sweep_cfg.empty()) apply_config_file(*sweep, sweep_cfg);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return lasersim::kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return lasersim::kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lasersim::kExitConfig;
    }

    if (app.got_subcommand(sim)) return run_simulate(*sim, sim_config, sim_dim, sim_methods, sim_out);
    if (app.got_subcommand(sweep))
        return lasersim::cmd_sweep(sweep_g, sweep_kappa,
                                   std::complex<double>(sweep_z_re, sweep_z_im), sweep_t_max,
                                   sweep_t_steps, sweep_out);
    const lasersim::ToleranceProfile p = profile == "strict"
                                             ? lasersim::ToleranceProfile::strict
                                             : lasersim::ToleranceProfile::default_profile;
    return lasersim::cmd_verify(p, std::cout);
}

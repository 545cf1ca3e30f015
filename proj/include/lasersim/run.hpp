#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lasersim/channel.hpp"

namespace lasersim {

enum class Method { closed, kraus, lindblad };

struct RunConfig {
    double g = 0.0;
    double kappa = 0.0;
    double z_re = 0.0;
    double z_im = 0.0;
    double t_max = 0.0;
    int t_steps = 100;
    std::optional<int> dim; // absent -> auto from the photon-number law
    std::set<Method> methods = {Method::closed};
};

enum class ToleranceProfile { default_profile, strict };

// Exit codes shared by all commands:
//   0 success, 1 verification failure, 2 usage/config error,
//   3 numerical/resource failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Working dimension max(32, ceil(4*nbar + 20)), capped at 512.
int auto_dim(double nbar);

// Dimension with extra safety margin used by the cross-validation suites:
// the geometric population ratio makes truncation error shrink like
// ratio^(2*dim), so tight tolerances need dim well past the default policy.
int margin_dim(Complex z, const LaserParams& params, double t);

// Fixed 17-significant-digit float formatting used for all CSV output.
std::string format_double(double x);

// Time-series CSV with columns per selected method:
//   t,n_closed,S_closed,specific_entropy,n_kraus,S_kraus,n_lindblad,S_lindblad
int cmd_simulate(const RunConfig& config, const std::string& out_path);

// Long-format CSV `series,g,kappa,t,n,S,specific_entropy`, series-major,
// closed-form observable laws per g in g_list. Honors the LASERSIM_THREADS
// environment variable for parallel series evaluation.
int cmd_sweep(const std::vector<double>& g_list, double kappa, Complex z, double t_max,
              int t_steps, const std::string& out_path);

// Full cross-validation suite; one report line per check. The strict profile
// tightens every tolerance tenfold.
int cmd_verify(ToleranceProfile profile, std::ostream& report);

} // namespace lasersim

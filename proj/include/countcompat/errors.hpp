#ifndef COUNTCOMPAT_ERRORS_HPP
#define COUNTCOMPAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace countcompat {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// series_pgf
struct order_mismatch_error : error { using error::error; };
struct singular_constant_error : error { using error::error; };
struct invalid_pgf_error : error { using error::error; };

// count_dists
struct parameter_error : error { using error::error; };
struct moment_divergence_error : error { using error::error; };

// compat
struct incompatible_parameters_error : error { using error::error; };
struct degenerate_spec_error : error { using error::error; };
struct unsupported_law_error : error { using error::error; };
struct domain_mismatch_error : error { using error::error; };

// lince_lp
struct correlation_bound_error : error { using error::error; };
struct out_of_scope_error : error { using error::error; };
struct numerical_failure_error : error { using error::error; };

// oracle
struct null_conditioning_error : error { using error::error; };
struct underdetermined_fit_error : error { using error::error; };

// simulate
struct divergence_error : error { using error::error; };
struct inconclusive_diagnostic_error : error { using error::error; };

// cli
struct config_error : error { using error::error; };

}  // namespace countcompat

#endif

#pragma once

#include <span>

namespace evalbench::numcore {

/// Correctly rounded sum of finite doubles (Shewchuk partials). The result
/// does not depend on the order of the inputs. Throws NumericError on a
/// non-finite input or an overflowing total.
double exact_sum(std::span<const double> xs);

}  // namespace evalbench::numcore

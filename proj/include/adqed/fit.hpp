#pragma once

#include <vector>

namespace adqed {

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double slope_stderr{0.0};
    double rms_residual{0.0};
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log(y) against log(x); all values must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> logspace(double lo, double hi, int n);
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace adqed

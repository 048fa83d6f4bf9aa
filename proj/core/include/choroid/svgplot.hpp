#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "choroid/stats.hpp"

namespace choroid::svg {

struct PlotLabels {
    std::string title;
    std::string xlabel;
    std::string ylabel;
};

/// Scatter of (x,y) with the identity line and the OLS fit. Deterministic
/// text output, no raster dependencies.
std::string correlation_plot(std::span<const double> xs, std::span<const double> ys,
                             const stats::LinFit& fit, const PlotLabels& labels);

/// Bland-Altman: (mean, difference) scatter with mean-difference and LoA lines.
std::string bland_altman_plot(std::span<const double> xs, std::span<const double> ys,
                              const stats::BlandAltman& ba, const PlotLabels& labels);

void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace choroid::svg

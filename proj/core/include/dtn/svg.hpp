// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_SVG_HPP
#define DTN_SVG_HPP

#include <string>
#include <vector>

namespace dtn
{

struct PlotSeries
{
  std::string label;
  std::vector<std::pair<double, double>> points;
};

enum class PlotKind
{
  SpectrumScatter,  // markers in the complex plane
  SectorCurves,     // log-x polylines, one per angle
  DecayTraces       // trajectories against time
};

// Self-contained SVG with labeled axes; byte-deterministic for identical input.
std::string RenderPlot(const std::vector<PlotSeries> &series, PlotKind kind,
                       const std::string &title);
void EmitPlot(const std::vector<PlotSeries> &series, PlotKind kind,
              const std::string &title, const std::string &path);

}  // namespace dtn

#endif  // DTN_SVG_HPP

#ifndef QARLAB_CSV_HPP
#define QARLAB_CSV_HPP

#include <string>
#include <vector>

#include "qarlab/spatial.hpp"

namespace qarlab {

// Wide data layout: header row of series names, one numeric column per
// series, rows are time points. Missing cells are a hard error.
struct WideTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    int rows() const { return columns.empty() ? 0 : static_cast<int>(columns[0].size()); }
    int cols() const { return static_cast<int>(columns.size()); }
    const std::vector<double>& column(const std::string& name) const;
};

WideTable read_wide_csv(const std::string& path);
void write_wide_csv(const std::string& path,
                    const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& columns);

// Station file: id,x,y[,elev]
StationSet read_stations_csv(const std::string& path);

// 17 significant digits, the emission format for all numeric output.
std::string fmt17(double v);

} // namespace qarlab

#endif

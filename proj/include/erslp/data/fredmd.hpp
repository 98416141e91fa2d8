#pragma once

#include "erslp/data/panel.hpp"
#include "erslp/data/preprocess.hpp"

#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

namespace erslp {

struct RawPanel {
    TimeSeriesPanel panel;
    std::vector<TransformCode> codes;
};

/// Reads the FRED-MD layout: "sasdate" + names, a "Transform:" row of integer codes,
/// then one row per date. Empty cells become missing. Blank trailing lines are ignored.
[[nodiscard]] RawPanel read_fredmd_csv(std::istream& in);
[[nodiscard]] RawPanel load_fredmd_csv(const std::filesystem::path& path);

/// Writes the same layout; numbers use 17 significant digits so reads round-trip exactly.
void write_fredmd_csv(std::ostream& out, const TimeSeriesPanel& panel, const std::vector<TransformCode>& codes);

}  // namespace erslp

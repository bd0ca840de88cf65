#pragma once

#include <string>

namespace wdipln {

enum class ArchitectureVariant {
    ColnNominal,    // MZM inputs and weights
    ColnThermal,    // thermal-MZI inputs and weights
    WdiplnNaive,    // one small ring per input and per weight
    WdiplnNominal,  // one large input ring per branch, small weight rings
};

ArchitectureVariant parse_variant(const std::string& name);
std::string variant_name(ArchitectureVariant v);

struct ArchitectureSpec {
    ArchitectureVariant variant = ArchitectureVariant::WdiplnNominal;
    int n = 8;  // layer width (branch count)
    int m = 1;  // wavelength channel count
    // Element sizes in mm^2; zero means "use the variant's default".
    double input_element_mm2 = 0.0;
    double weight_element_mm2 = 0.0;
    int io_per_element = 4;  // 2 electro-optic + 2 thermal
};

struct ScalingReport {
    std::string variant;
    int n = 0, m = 0;
    long long element_count = 0;
    long long input_element_count = 0;
    long long weight_element_count = 0;
    double footprint_mm2 = 0.0;  // component size only, no routing
    long long electrical_io = 0;
};

long long element_count(const ArchitectureSpec& spec);
double footprint_mm2(const ArchitectureSpec& spec);
long long electrical_io(const ArchitectureSpec& spec);
ScalingReport scaling_report(const ArchitectureSpec& spec);

/// Area of a rectangular pad grid: rows*pitch by cols*pitch, in mm^2.
/// Throws when the grid cannot hold `pad_count` pads.
double pad_area_mm2(int pad_count, double pitch_um, int grid_rows,
                    int grid_cols);

/// Aligned text table of the report (component sizes only, no routing).
std::string report_table(const ScalingReport& report);
std::string report_json(const ScalingReport& report);

}  // namespace wdipln

#include "wdipln/scaling.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wdipln {

namespace {

constexpr double mzm_mm2 = 0.8;
constexpr double thermal_mzi_mm2 = 0.1;
constexpr double small_mrd_mm2 = 1e-4;
constexpr double large_mrd_mm2 = 1e-2;

void validate(const ArchitectureSpec& spec) {
    if (spec.n < 1 || spec.m < 1)
        throw std::invalid_argument("ArchitectureSpec: N and M must be >= 1");
    if (spec.input_element_mm2 < 0.0 || spec.weight_element_mm2 < 0.0)
        throw std::invalid_argument("ArchitectureSpec: element sizes must be "
                                    "positive");
    if (spec.io_per_element < 1)
        throw std::invalid_argument("ArchitectureSpec: io_per_element must be "
                                    ">= 1");
}

double default_input_size(ArchitectureVariant v) {
    switch (v) {
        case ArchitectureVariant::ColnNominal: return mzm_mm2;
        case ArchitectureVariant::ColnThermal: return mzm_mm2;  // thermal MZI is the weight only
        case ArchitectureVariant::WdiplnNaive: return small_mrd_mm2;
        case ArchitectureVariant::WdiplnNominal: return large_mrd_mm2;
    }
    throw std::invalid_argument("unknown architecture variant");
}

double default_weight_size(ArchitectureVariant v) {
    switch (v) {
        case ArchitectureVariant::ColnNominal: return mzm_mm2;
        case ArchitectureVariant::ColnThermal: return thermal_mzi_mm2;
        case ArchitectureVariant::WdiplnNaive: return small_mrd_mm2;
        case ArchitectureVariant::WdiplnNominal: return small_mrd_mm2;
    }
    throw std::invalid_argument("unknown architecture variant");
}

long long input_count(const ArchitectureSpec& spec) {
    // The nominal WDIPLN shares one large input ring per branch; every other
    // variant needs an input element per (branch, channel).
    return spec.variant == ArchitectureVariant::WdiplnNominal
               ? spec.n
               : static_cast<long long>(spec.n) * spec.m;
}

long long weight_count(const ArchitectureSpec& spec) {
    return static_cast<long long>(spec.n) * spec.m;
}

}  // namespace

ArchitectureVariant parse_variant(const std::string& name) {
    if (name == "coln" || name == "coln-nominal")
        return ArchitectureVariant::ColnNominal;
    if (name == "coln-thermal") return ArchitectureVariant::ColnThermal;
    if (name == "wdipln-naive") return ArchitectureVariant::WdiplnNaive;
    if (name == "wdipln-nominal") return ArchitectureVariant::WdiplnNominal;
    throw std::invalid_argument(
        "unknown variant '" + name +
        "' (expected coln|coln-thermal|wdipln-naive|wdipln-nominal)");
}

std::string variant_name(ArchitectureVariant v) {
    switch (v) {
        case ArchitectureVariant::ColnNominal: return "coln";
        case ArchitectureVariant::ColnThermal: return "coln-thermal";
        case ArchitectureVariant::WdiplnNaive: return "wdipln-naive";
        case ArchitectureVariant::WdiplnNominal: return "wdipln-nominal";
    }
    return "?";
}

long long element_count(const ArchitectureSpec& spec) {
    validate(spec);
    return input_count(spec) + weight_count(spec);
}

double footprint_mm2(const ArchitectureSpec& spec) {
    validate(spec);
    const double in_sz = spec.input_element_mm2 > 0.0
                             ? spec.input_element_mm2
                             : default_input_size(spec.variant);
    const double w_sz = spec.weight_element_mm2 > 0.0
                            ? spec.weight_element_mm2
                            : default_weight_size(spec.variant);
    return input_count(spec) * in_sz + weight_count(spec) * w_sz;
}

long long electrical_io(const ArchitectureSpec& spec) {
    return static_cast<long long>(spec.io_per_element) * element_count(spec);
}

ScalingReport scaling_report(const ArchitectureSpec& spec) {
    ScalingReport r;
    r.variant = variant_name(spec.variant);
    r.n = spec.n;
    r.m = spec.m;
    r.input_element_count = input_count(spec);
    r.weight_element_count = weight_count(spec);
    r.element_count = element_count(spec);
    r.footprint_mm2 = footprint_mm2(spec);
    r.electrical_io = electrical_io(spec);
    return r;
}

double pad_area_mm2(int pad_count, double pitch_um, int grid_rows,
                    int grid_cols) {
    if (pad_count < 0 || grid_rows < 1 || grid_cols < 1 || !(pitch_um > 0.0))
        throw std::invalid_argument("pad_area: invalid grid parameters");
    if (static_cast<long long>(grid_rows) * grid_cols < pad_count)
        throw std::invalid_argument("pad_area: grid capacity smaller than pad "
                                    "count");
    return (grid_rows * pitch_um * 1e-3) * (grid_cols * pitch_um * 1e-3);
}

std::string report_table(const ScalingReport& r) {
    std::ostringstream os;
    os << "Architecture          : " << r.variant << "\n"
       << "Layer width N         : " << r.n << "\n"
       << "Channels M            : " << r.m << "\n"
       << "Input elements        : " << r.input_element_count << "\n"
       << "Weight elements       : " << r.weight_element_count << "\n"
       << "Total elements        : " << r.element_count << "\n"
       << "Physical size (mm^2)  : " << r.footprint_mm2
       << "  (component size only, no routing considered)\n"
       << "Electrical I/O        : " << r.electrical_io << "\n";
    return os.str();
}

std::string report_json(const ScalingReport& r) {
    nlohmann::json j;
    j["variant"] = r.variant;
    j["n"] = r.n;
    j["m"] = r.m;
    j["input_element_count"] = r.input_element_count;
    j["weight_element_count"] = r.weight_element_count;
    j["element_count"] = r.element_count;
    j["footprint_mm2"] = r.footprint_mm2;
    j["footprint_note"] = "component size only, no routing considered";
    j["electrical_io"] = r.electrical_io;
    return j.dump(2) + "\n";
}

}  // namespace wdipln

#include "oscbound/concentration.hpp"

#include "oscbound/basis.hpp"
#include "oscbound/error.hpp"

#include <bit>
#include <cmath>

namespace oscbound {

ConcentrationInstance::ConcentrationInstance(std::size_t bits, std::vector<double> values, double bias)
    : m(bits), table(std::move(values)), p(bias) {
    if (m > kMaxConcentrationBits) {
        throw Error(ErrorCode::InvalidArgument, "instance has more than 20 coordinates");
    }
    if (table.size() != (std::size_t{1} << m)) {
        throw Error(ErrorCode::InvalidArgument, "table size must be 2^m");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "bias must lie in [0, 1]");
    for (double v : table) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "table values must be finite");
    }
}

nlohmann::json ConcentrationInstance::to_json() const {
    return {{"m", m}, {"p", p}, {"table", table}};
}

ConcentrationInstance ConcentrationInstance::from_json(const nlohmann::json& j) {
    return ConcentrationInstance(j.at("m").get<std::size_t>(), j.at("table").get<std::vector<double>>(),
                                 j.value("p", 0.5));
}

std::vector<double> bounded_differences(const ConcentrationInstance& inst) {
    std::vector<double> a(inst.m, 0.0);
    for (std::size_t i = 0; i < inst.m; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t x = 0; x < inst.table.size(); ++x) {
            if (x & bit) continue;
            a[i] = std::max(a[i], std::fabs(inst.table[x] - inst.table[x | bit]));
        }
    }
    return a;
}

ConcentrationCheck check_concentration(const ConcentrationInstance& inst) {
    const std::size_t size = inst.table.size();
    std::vector<long double> weight(size);
    for (std::size_t x = 0; x < size; ++x) {
        const auto ones = static_cast<long double>(std::popcount(x));
        weight[x] = std::pow(static_cast<long double>(inst.p), ones) *
                    std::pow(1.0L - inst.p, static_cast<long double>(inst.m) - ones);
    }
    long double mean = 0.0L;
    for (std::size_t x = 0; x < size; ++x) mean += weight[x] * inst.table[x];
    long double dev = 0.0L;
    for (std::size_t x = 0; x < size; ++x) dev += weight[x] * std::fabs(inst.table[x] - mean);
    long double sq = 0.0L;
    for (double v : bounded_differences(inst)) sq += static_cast<long double>(v) * v;
    return {static_cast<double>(mean), static_cast<double>(dev), static_cast<double>(std::sqrt(sq) / 2)};
}

ConcentrationInstance subcube_gadget(const GridFunction& f, const IndexBox& r) {
    const auto info = classify_false_cube(r);
    if (!info) throw Error(ErrorCode::NotAFalseCube, "not a false cube");
    const PrefixSumTable table(f);
    std::vector<double> values;
    for (const auto& q : false_cube_subcubes(r, *info)) values.push_back(box_mean(table, q));
    return ConcentrationInstance(info->long_axes.size(), std::move(values), 0.5);
}

}  // namespace oscbound

#include "oscbound/grid.hpp"

#include "oscbound/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oscbound {

std::size_t IndexBox::cell_count() const {
    std::size_t count = 1;
    for (std::size_t a = 0; a < dim; ++a) {
        if (hi[a] <= lo[a]) return 0;
        count *= hi[a] - lo[a];
    }
    return count;
}

bool IndexBox::empty() const {
    for (std::size_t a = 0; a < dim; ++a) {
        if (hi[a] <= lo[a]) return true;
    }
    return dim == 0;
}

bool IndexBox::contains(const IndexBox& other) const {
    for (std::size_t a = 0; a < dim; ++a) {
        if (other.lo[a] < lo[a] || other.hi[a] > hi[a]) return false;
    }
    return true;
}

bool IndexBox::operator==(const IndexBox& other) const {
    if (dim != other.dim) return false;
    for (std::size_t a = 0; a < dim; ++a) {
        if (lo[a] != other.lo[a] || hi[a] != other.hi[a]) return false;
    }
    return true;
}

Box Box::from_cells(const IndexBox& cells) {
    Box b;
    b.dim = cells.dim;
    for (std::size_t a = 0; a < cells.dim; ++a) {
        b.lo[a] = static_cast<double>(cells.lo[a]);
        b.hi[a] = static_cast<double>(cells.hi[a]);
    }
    return b;
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < dim; ++a) v *= std::max(0.0, hi[a] - lo[a]);
    return v;
}

bool Box::is_cell_aligned() const {
    for (std::size_t a = 0; a < dim; ++a) {
        if (lo[a] != std::floor(lo[a]) || hi[a] != std::floor(hi[a]) || lo[a] < 0.0) {
            return false;
        }
    }
    return true;
}

IndexBox Box::cells() const {
    IndexBox c;
    c.dim = dim;
    for (std::size_t a = 0; a < dim; ++a) {
        c.lo[a] = static_cast<std::size_t>(lo[a]);
        c.hi[a] = static_cast<std::size_t>(hi[a]);
    }
    return c;
}

bool Box::contains(const Box& other, double tol) const {
    for (std::size_t a = 0; a < dim; ++a) {
        if (other.lo[a] < lo[a] - tol || other.hi[a] > hi[a] + tol) return false;
    }
    return true;
}

double Box::overlap(const Box& other) const {
    double v = 1.0;
    for (std::size_t a = 0; a < dim; ++a) {
        const double len = std::min(hi[a], other.hi[a]) - std::max(lo[a], other.lo[a]);
        if (len <= 0.0) return 0.0;
        v *= len;
    }
    return v;
}

namespace {

std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& extents) {
    std::vector<std::size_t> strides(extents.size(), 1);
    for (std::size_t a = extents.size(); a-- > 1;) {
        strides[a - 1] = strides[a] * extents[a];
    }
    return strides;
}

}  // namespace

GridFunction::GridFunction(std::vector<std::size_t> extents, double cell_size,
                           std::vector<double> origin, std::vector<double> values)
    : extents_(std::move(extents)),
      cell_size_(cell_size),
      cell_measure_(0.0),
      origin_(std::move(origin)),
      values_(std::move(values)) {
    if (extents_.empty() || extents_.size() > kMaxDim) {
        throw Error(ErrorCode::InvalidGrid,
                    "grid dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    if (origin_.size() != extents_.size()) {
        throw Error(ErrorCode::InvalidGrid, "origin has wrong dimension");
    }
    std::size_t count = 1;
    for (auto e : extents_) {
        if (e == 0) throw Error(ErrorCode::InvalidGrid, "extents must be positive");
        count *= e;
    }
    if (values_.size() != count) {
        throw Error(ErrorCode::InvalidGrid, "value count " + std::to_string(values_.size()) +
                                                " does not match extents (" +
                                                std::to_string(count) + ")");
    }
    if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
        throw Error(ErrorCode::InvalidGrid, "cell size must be positive and finite");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidGrid, "grid values must be finite");
    }
    for (double o : origin_) {
        if (!std::isfinite(o)) throw Error(ErrorCode::InvalidGrid, "origin must be finite");
    }
    cell_measure_ = std::pow(cell_size_, static_cast<double>(extents_.size()));
    if (!(cell_measure_ > 0.0)) {
        throw Error(ErrorCode::InvalidGrid, "cell measure underflows");
    }
    strides_ = row_major_strides(extents_);
}

GridFunction::GridFunction(std::vector<std::size_t> extents, double cell_size,
                           std::vector<double> values)
    : GridFunction(extents, cell_size, std::vector<double>(extents.size(), 0.0),
                   std::move(values)) {}

GridFunction GridFunction::constant(std::vector<std::size_t> extents, double cell_size,
                                    double value) {
    std::size_t count = 1;
    for (auto e : extents) count *= e;
    return GridFunction(std::move(extents), cell_size, std::vector<double>(count, value));
}

std::size_t GridFunction::linear_index(std::span<const std::size_t> index) const {
    std::size_t linear = 0;
    for (std::size_t a = 0; a < extents_.size(); ++a) linear += index[a] * strides_[a];
    return linear;
}

double GridFunction::at(std::span<const std::size_t> index) const {
    return values_[linear_index(index)];
}

IndexBox GridFunction::domain() const {
    IndexBox b;
    b.dim = dim();
    for (std::size_t a = 0; a < dim(); ++a) {
        b.lo[a] = 0;
        b.hi[a] = extents_[a];
    }
    return b;
}

double GridFunction::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

PrefixSumTable::PrefixSumTable(const GridFunction& f) : PrefixSumTable(f, false) {}

PrefixSumTable PrefixSumTable::of_squares(const GridFunction& f) { return PrefixSumTable(f, true); }

PrefixSumTable::PrefixSumTable(const GridFunction& f, bool squares)
    : extents_(f.extents().begin(), f.extents().end()), cell_measure_(f.cell_measure()) {
    const std::size_t n = extents_.size();
    std::vector<std::size_t> padded(n);
    for (std::size_t a = 0; a < n; ++a) padded[a] = extents_[a] + 1;
    table_strides_ = row_major_strides(padded);
    std::size_t total = 1;
    for (auto p : padded) total *= p;
    table_.assign(total, 0.0L);

    // Scatter values to the (+1,...,+1) shifted positions.
    const auto strides = f.strides();
    std::size_t shift = 0;
    for (std::size_t a = 0; a < n; ++a) shift += table_strides_[a];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::size_t rem = i;
        std::size_t t = shift;
        for (std::size_t a = 0; a < n; ++a) {
            const std::size_t c = rem / strides[a];
            rem -= c * strides[a];
            t += c * table_strides_[a];
        }
        const long double v = f[i];
        table_[t] = squares ? v * v : v;
    }

    // One cumulative pass per axis.
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t stride = table_strides_[a];
        for (std::size_t t = 0; t < total; ++t) {
            const std::size_t coord = (t / stride) % padded[a];
            if (coord > 0) table_[t] += table_[t - stride];
        }
    }
}

long double PrefixSumTable::value_sum(const IndexBox& box) const {
    const std::size_t n = extents_.size();
    for (std::size_t a = 0; a < n; ++a) {
        if (box.hi[a] > extents_[a] || box.lo[a] > box.hi[a]) {
            throw Error(ErrorCode::OutOfRange, "box outside grid extents");
        }
    }
    long double sum = 0.0L;
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < corners; ++mask) {
        std::size_t t = 0;
        std::size_t lows = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (mask & (std::size_t{1} << a)) {
                t += box.hi[a] * table_strides_[a];
            } else {
                t += box.lo[a] * table_strides_[a];
                ++lows;
            }
        }
        if (lows % 2 == 0) {
            sum += table_[t];
        } else {
            sum -= table_[t];
        }
    }
    return sum;
}

double PrefixSumTable::box_sum(const IndexBox& box) const {
    return static_cast<double>(value_sum(box) * static_cast<long double>(cell_measure_));
}

double box_mean(const PrefixSumTable& table, const IndexBox& box) {
    const std::size_t count = box.cell_count();
    if (count == 0) throw Error(ErrorCode::EmptyShape, "empty shape");
    return static_cast<double>(table.value_sum(box) / static_cast<long double>(count));
}

namespace detail {

AxisWeights axis_weights(double lo, double hi, std::size_t extent) {
    AxisWeights out;
    const double clo = std::max(lo, 0.0);
    const double chi = std::min(hi, static_cast<double>(extent));
    if (!(chi > clo)) return out;
    const auto first = static_cast<std::size_t>(std::floor(clo));
    auto last = static_cast<std::size_t>(std::ceil(chi));
    last = std::min(last, extent);
    out.first = first;
    for (std::size_t c = first; c < last; ++c) {
        const double w = std::min(chi, static_cast<double>(c + 1)) -
                         std::max(clo, static_cast<double>(c));
        out.weights.push_back(std::max(0.0, w));
    }
    return out;
}

}  // namespace detail

double box_integral(const GridFunction& f, const Box& box) {
    long double sum = 0.0L;
    for_each_weighted_cell(f, box, [&](std::size_t i, double w) {
        sum += static_cast<long double>(w) * f[i];
    });
    return static_cast<double>(sum * static_cast<long double>(f.cell_measure()));
}

double box_mean(const GridFunction& f, const Box& box) {
    long double sum = 0.0L;
    long double weight = 0.0L;
    for_each_weighted_cell(f, box, [&](std::size_t i, double w) {
        sum += static_cast<long double>(w) * f[i];
        weight += w;
    });
    if (!(weight > 0.0L)) throw Error(ErrorCode::EmptyShape, "empty shape");
    return static_cast<double>(sum / weight);
}

}  // namespace oscbound

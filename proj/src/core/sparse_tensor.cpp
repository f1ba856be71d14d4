#include "sparse_tensor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace scadatd {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) raise(ErrorCode::numeric, "format_double: conversion failed");
    return std::string(buf, ptr);
}

SparseTensorCOO::SparseTensorCOO(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    if (shape_.empty()) raise(ErrorCode::invalid_argument, "tensor: shape must have at least one dimension");
    for (std::size_t n : shape_)
        if (n == 0) raise(ErrorCode::invalid_argument, "tensor: zero-length dimension");
}

void SparseTensorCOO::add(const std::vector<std::size_t>& coord, double value) {
    if (coord.size() != shape_.size())
        raise(ErrorCode::invalid_argument, "tensor: coordinate arity does not match tensor order");
    for (std::size_t d = 0; d < coord.size(); ++d)
        if (coord[d] >= shape_[d])
            raise(ErrorCode::invalid_argument, "tensor: coordinate out of bounds in dimension " + std::to_string(d));
    if (!std::isfinite(value)) raise(ErrorCode::numeric, "tensor: non-finite entry value");
    coords_.insert(coords_.end(), coord.begin(), coord.end());
    values_.push_back(value);
    dirty_ = true;
}

void SparseTensorCOO::finalize() {
    const std::size_t d = order();
    const std::size_t n = values_.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(coords_.begin() + a * d, coords_.begin() + (a + 1) * d,
                                            coords_.begin() + b * d, coords_.begin() + (b + 1) * d);
    });

    std::vector<std::size_t> coords;
    std::vector<double> values;
    coords.reserve(coords_.size());
    values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t e = perm[k];
        const auto begin = coords_.begin() + e * d;
        const bool same_as_last = !values.empty() &&
            std::equal(begin, begin + d, coords.end() - d);
        if (same_as_last) {
            values.back() += values_[e];
        } else {
            coords.insert(coords.end(), begin, begin + d);
            values.push_back(values_[e]);
        }
    }

    // Drop entries that cancelled to zero (or were added as zero).
    std::vector<std::size_t> kept_coords;
    std::vector<double> kept_values;
    kept_coords.reserve(coords.size());
    kept_values.reserve(values.size());
    for (std::size_t e = 0; e < values.size(); ++e) {
        if (values[e] == 0.0) continue;
        if (values[e] < 0.0) raise(ErrorCode::data, "tensor: negative count after accumulation");
        kept_coords.insert(kept_coords.end(), coords.begin() + e * d, coords.begin() + (e + 1) * d);
        kept_values.push_back(values[e]);
    }

    coords_ = std::move(kept_coords);
    values_ = std::move(kept_values);
    dirty_ = false;
}

void SparseTensorCOO::require_finalized(const char* op) const {
    if (dirty_) raise(ErrorCode::invalid_argument, std::string("tensor: ") + op + " requires finalize() first");
}

std::size_t SparseTensorCOO::nnz() const {
    require_finalized("nnz");
    return values_.size();
}

double SparseTensorCOO::cell_count() const {
    double cells = 1.0;
    for (std::size_t n : shape_) cells *= static_cast<double>(n);
    return cells;
}

double SparseTensorCOO::value_sum() const {
    require_finalized("value_sum");
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

double SparseTensorCOO::lookup(const std::vector<std::size_t>& coord) const {
    require_finalized("lookup");
    if (coord.size() != shape_.size())
        raise(ErrorCode::invalid_argument, "tensor: coordinate arity does not match tensor order");
    for (std::size_t d = 0; d < coord.size(); ++d)
        if (coord[d] >= shape_[d])
            raise(ErrorCode::invalid_argument, "tensor: coordinate out of bounds in dimension " + std::to_string(d));
    const std::size_t d = order();
    const std::size_t n = values_.size();
    // Binary search over the sorted entry list.
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const auto begin = coords_.begin() + mid * d;
        if (std::lexicographical_compare(begin, begin + d, coord.begin(), coord.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < n && std::equal(coords_.begin() + lo * d, coords_.begin() + (lo + 1) * d, coord.begin()))
        return values_[lo];
    return 0.0;
}

double SparseTensorCOO::density() const {
    require_finalized("density");
    return static_cast<double>(values_.size()) / cell_count();
}

void SparseTensorCOO::binarize() {
    require_finalized("binarize");
    std::fill(values_.begin(), values_.end(), 1.0);
}

long long SparseTensorCOO::inflate_binary() {
    require_finalized("inflate_binary");
    if (values_.empty()) raise(ErrorCode::invalid_argument, "tensor: cannot inflate an empty tensor");
    for (double v : values_)
        if (v != 1.0) raise(ErrorCode::invalid_argument, "tensor: inflate_binary requires all entries equal to 1");
    const long long c = std::llround(cell_count() / static_cast<double>(values_.size()));
    const long long scaled = std::max(1LL, c);
    std::fill(values_.begin(), values_.end(), static_cast<double>(scaled));
    return scaled;
}

void SparseTensorCOO::write(std::ostream& out) const {
    require_finalized("write");
    out << "shape=";
    for (std::size_t d = 0; d < shape_.size(); ++d) {
        if (d) out << ',';
        out << shape_[d];
    }
    out << '\n';
    const std::size_t d = order();
    for (std::size_t e = 0; e < values_.size(); ++e) {
        for (std::size_t k = 0; k < d; ++k) out << coords_[e * d + k] << ',';
        out << format_double(values_[e]) << '\n';
    }
}

SparseTensorCOO SparseTensorCOO::read(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::data, "tensor: empty input");
    if (line.rfind("shape=", 0) != 0) raise(ErrorCode::data, "tensor: first line must start with shape=");

    std::vector<std::size_t> shape;
    {
        std::stringstream ss(line.substr(6));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            std::size_t n = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
            if (ec != std::errc{} || p != tok.data() + tok.size())
                raise(ErrorCode::data, "tensor: malformed shape token '" + tok + "'");
            shape.push_back(n);
        }
    }
    SparseTensorCOO t(shape);

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (fields.size() != shape.size() + 1)
            raise(ErrorCode::data, "tensor: line " + std::to_string(lineno) + " has " +
                                       std::to_string(fields.size()) + " fields, expected " +
                                       std::to_string(shape.size() + 1));
        std::vector<std::size_t> coord(shape.size());
        for (std::size_t d = 0; d < shape.size(); ++d) {
            auto [p, ec] = std::from_chars(fields[d].data(), fields[d].data() + fields[d].size(), coord[d]);
            if (ec != std::errc{} || p != fields[d].data() + fields[d].size())
                raise(ErrorCode::data, "tensor: malformed index on line " + std::to_string(lineno));
        }
        double v = 0.0;
        const std::string& vf = fields.back();
        auto [p, ec] = std::from_chars(vf.data(), vf.data() + vf.size(), v);
        if (ec != std::errc{} || p != vf.data() + vf.size())
            raise(ErrorCode::data, "tensor: malformed value on line " + std::to_string(lineno));
        t.add(coord, v);
    }
    t.finalize();
    return t;
}

void SparseTensorCOO::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::io, "tensor: cannot open for writing: " + path);
    write(out);
    if (!out) raise(ErrorCode::io, "tensor: write failed: " + path);
}

SparseTensorCOO SparseTensorCOO::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "tensor: cannot open: " + path);
    return read(in);
}

} // namespace scadatd

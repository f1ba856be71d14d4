#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace scadatd {

// Sparse count tensor in coordinate form. Entries are kept sorted
// lexicographically by coordinate, with no duplicates and strictly positive
// values; every mutation path re-establishes that invariant.
class SparseTensorCOO {
public:
    SparseTensorCOO() = default;
    explicit SparseTensorCOO(std::vector<std::size_t> shape);

    // Accumulates +value at the given coordinate (duplicates merge).
    void add(const std::vector<std::size_t>& coord, double value);

    // Sorts, merges duplicates, and drops zero-valued entries. add() marks the
    // tensor dirty; accessors below require a finalized tensor.
    void finalize();

    std::size_t order() const { return shape_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t nnz() const;

    // Total number of cells, as a double to avoid overflow for large shapes.
    double cell_count() const;

    // Coordinate of entry e along dimension d, stored row-major per entry.
    std::size_t coord(std::size_t e, std::size_t d) const { return coords_[e * order() + d]; }
    double value(std::size_t e) const { return values_[e]; }
    const std::vector<std::size_t>& coords_flat() const { return coords_; }
    const std::vector<double>& values() const { return values_; }

    double value_sum() const;

    // Stored value at the coordinate, or 0 for an in-bounds unstored cell.
    double lookup(const std::vector<std::size_t>& coord) const;

    // Fraction of cells that are stored, in [0, 1].
    double density() const;

    // Collapses every stored value to 1, keeping the support.
    void binarize();

    // Replaces every stored value with `c = llround(cell_count / nnz)`, the
    // integer that brings the tensor's mean over all cells closest to 1. Used
    // on binary tensors so that model rates live on a common scale.
    long long inflate_binary();

    // Text round trip: "shape=N1,N2,...\n" then one "i1,i2,...,value" CSV row
    // per entry, sorted. Values print with shortest round-trip formatting, so
    // write followed by read reproduces the tensor exactly.
    void write(std::ostream& out) const;
    static SparseTensorCOO read(std::istream& in);

    void save(const std::string& path) const;
    static SparseTensorCOO load(const std::string& path);

    bool operator==(const SparseTensorCOO& other) const = default;

private:
    void require_finalized(const char* op) const;

    std::vector<std::size_t> shape_;
    std::vector<std::size_t> coords_; // entry-major: entry e occupies [e*order, (e+1)*order)
    std::vector<double> values_;
    bool dirty_ = false;
};

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

} // namespace scadatd

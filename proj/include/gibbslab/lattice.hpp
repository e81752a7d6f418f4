// Lattice geometry and configuration substrate: vectors with the l1 norm,
// cubic boxes C_n = [0,n]^d, finite configurations on boxes or tori, and
// n-patterns (symbol assignments on C_n).
//
// Conventions fixed here and relied on everywhere else:
//   - a Box with side n covers sites origin + [0,n]^d, so (n+1)^d sites;
//   - storage is row-major over a fixed site enumeration with the last axis
//     fastest;
//   - symbols are small integers < alphabet;
//   - pattern placements on a torus do not wrap unless asked to.
#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "gibbslab/common.hpp"

namespace gibbslab {

using Symbol = std::uint8_t;

inline constexpr int kMaxDim = 3;

class LatticeVector {
public:
    LatticeVector() = default;
    LatticeVector(int d, std::array<int, kMaxDim> c) : d_(d), c_(c) { validate_dim(d); }
    static LatticeVector zero(int d) { return LatticeVector(d, {0, 0, 0}); }
    static LatticeVector of(std::vector<int> coords) {
        LatticeVector v;
        v.d_ = static_cast<int>(coords.size());
        validate_dim(v.d_);
        for (int i = 0; i < v.d_; ++i) v.c_[i] = coords[static_cast<std::size_t>(i)];
        return v;
    }

    int dim() const { return d_; }
    int operator[](int axis) const { return c_[static_cast<std::size_t>(axis)]; }
    int& operator[](int axis) { return c_[static_cast<std::size_t>(axis)]; }

    // l1 norm
    int l1() const {
        int s = 0;
        for (int i = 0; i < d_; ++i) s += c_[static_cast<std::size_t>(i)] < 0 ? -c_[static_cast<std::size_t>(i)] : c_[static_cast<std::size_t>(i)];
        return s;
    }
    bool is_zero() const {
        for (int i = 0; i < d_; ++i)
            if (c_[static_cast<std::size_t>(i)] != 0) return false;
        return true;
    }

    LatticeVector operator+(const LatticeVector& o) const {
        check_same_dim(o);
        LatticeVector r = *this;
        for (int i = 0; i < d_; ++i) r.c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
        return r;
    }
    LatticeVector operator-(const LatticeVector& o) const {
        check_same_dim(o);
        LatticeVector r = *this;
        for (int i = 0; i < d_; ++i) r.c_[static_cast<std::size_t>(i)] -= o.c_[static_cast<std::size_t>(i)];
        return r;
    }
    LatticeVector operator-() const {
        LatticeVector r = *this;
        for (int i = 0; i < d_; ++i) r.c_[static_cast<std::size_t>(i)] = -r.c_[static_cast<std::size_t>(i)];
        return r;
    }
    bool operator==(const LatticeVector& o) const { return d_ == o.d_ && c_ == o.c_; }
    bool operator!=(const LatticeVector& o) const { return !(*this == o); }
    // Lexicographic order; used to normalize interaction shapes and fix
    // deterministic scan orders.
    bool operator<(const LatticeVector& o) const {
        check_same_dim(o);
        for (int i = 0; i < d_; ++i) {
            if (c_[static_cast<std::size_t>(i)] != o.c_[static_cast<std::size_t>(i)])
                return c_[static_cast<std::size_t>(i)] < o.c_[static_cast<std::size_t>(i)];
        }
        return false;
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < d_; ++i) s += (i ? "," : "") + std::to_string(c_[static_cast<std::size_t>(i)]);
        return s + ")";
    }

private:
    static void validate_dim(int d) {
        if (d < 1 || d > kMaxDim) throw ValidationError("lattice dimension must be in [1," + std::to_string(kMaxDim) + "]");
    }
    void check_same_dim(const LatticeVector& o) const {
        if (d_ != o.d_) throw ValidationError("mixing lattice vectors of different dimension");
    }

    int d_ = 1;
    std::array<int, kMaxDim> c_{0, 0, 0};
};

struct Box {
    LatticeVector origin;
    int side = 0;  // sites origin + [0, side]^d

    int dim() const { return origin.dim(); }
    long long site_count() const { return static_cast<long long>(ipow(static_cast<std::uint64_t>(side) + 1, static_cast<unsigned>(dim()))); }
    bool contains(const LatticeVector& site) const {
        for (int i = 0; i < dim(); ++i) {
            const int rel = site[i] - origin[i];
            if (rel < 0 || rel > side) return false;
        }
        return true;
    }
    bool contains(const Box& inner) const {
        for (int i = 0; i < dim(); ++i) {
            if (inner.origin[i] < origin[i]) return false;
            if (inner.origin[i] + inner.side > origin[i] + side) return false;
        }
        return true;
    }
    // C_n: the cube at the origin with side n.
    static Box cube(int d, int n) { return Box{LatticeVector::zero(d), n}; }
};

class Pattern;

// A finite configuration. Box domains carry absolute coordinates; torus
// domains live on [0,L)^d with periodic reads.
class Configuration {
public:
    Configuration() = default;

    static Configuration box(int d, const LatticeVector& origin, int extent, int alphabet) {
        return Configuration(d, origin, extent, alphabet, false);
    }
    // Configuration on the box with sites [0, side]^d (extent side+1).
    static Configuration cube(int d, int side, int alphabet) {
        return Configuration(d, LatticeVector::zero(d), side + 1, alphabet, false);
    }
    static Configuration torus(int d, int length, int alphabet) {
        return Configuration(d, LatticeVector::zero(d), length, alphabet, true);
    }

    int dim() const { return d_; }
    int alphabet() const { return alphabet_; }
    bool is_torus() const { return torus_; }
    const LatticeVector& origin() const { return origin_; }
    int extent() const { return ext_; }                      // sites per axis
    long long site_count() const { return static_cast<long long>(v_.size()); }
    const std::vector<Symbol>& values() const { return v_; }
    std::vector<Symbol>& values() { return v_; }
    const Symbol* data() const { return v_.data(); }
    Symbol* data() { return v_.data(); }

    // Row-major flat index of a relative site (coordinates in [0, extent)).
    long long flat(const LatticeVector& rel) const {
        long long idx = 0;
        for (int i = 0; i < d_; ++i) idx = idx * ext_ + rel[i];
        return idx;
    }

    bool in_domain(const LatticeVector& site) const {
        if (torus_) return true;
        for (int i = 0; i < d_; ++i) {
            const int rel = site[i] - origin_[i];
            if (rel < 0 || rel >= ext_) return false;
        }
        return true;
    }
    bool contains_box(const Box& b) const {
        if (torus_) {
            for (int i = 0; i < d_; ++i)
                if (b.origin[i] < 0 || b.origin[i] + b.side >= ext_) return false;
            return true;
        }
        for (int i = 0; i < d_; ++i) {
            if (b.origin[i] < origin_[i]) return false;
            if (b.origin[i] + b.side > origin_[i] + ext_ - 1) return false;
        }
        return true;
    }

    // Value at an absolute site. Tori wrap; boxes throw when off-domain.
    Symbol at(const LatticeVector& site) const {
        long long idx = 0;
        for (int i = 0; i < d_; ++i) {
            long long rel = site[i] - origin_[i];
            if (torus_) {
                rel %= ext_;
                if (rel < 0) rel += ext_;
            } else if (rel < 0 || rel >= ext_) {
                throw ValidationError("site " + site.str() + " outside configuration domain");
            }
            idx = idx * ext_ + rel;
        }
        return v_[static_cast<std::size_t>(idx)];
    }
    void set(const LatticeVector& site, Symbol s) {
        long long idx = 0;
        for (int i = 0; i < d_; ++i) {
            long long rel = site[i] - origin_[i];
            if (torus_) {
                rel %= ext_;
                if (rel < 0) rel += ext_;
            } else if (rel < 0 || rel >= ext_) {
                throw ValidationError("site " + site.str() + " outside configuration domain");
            }
            idx = idx * ext_ + rel;
        }
        v_[static_cast<std::size_t>(idx)] = s;
    }

    std::uint64_t content_hash() const;

    std::string to_json_string() const;
    static Configuration from_json_string(const std::string& text);

private:
    Configuration(int d, const LatticeVector& origin, int extent, int alphabet, bool torus)
        : d_(d), alphabet_(alphabet), torus_(torus), origin_(origin), ext_(extent) {
        if (d < 1 || d > kMaxDim) throw ValidationError("configuration dimension out of range");
        if (extent < 1) throw ValidationError("configuration extent must be >= 1");
        if (alphabet < 1) throw ValidationError("alphabet size must be >= 1");
        long long n = 1;
        for (int i = 0; i < d; ++i) n *= extent;
        v_.assign(static_cast<std::size_t>(n), 0);
    }

    int d_ = 1;
    int alphabet_ = 2;
    bool torus_ = false;
    LatticeVector origin_ = LatticeVector::zero(1);
    int ext_ = 1;
    std::vector<Symbol> v_;
};

// Symbols on C_n = [0,n]^d, row-major with the last axis fastest.
class Pattern {
public:
    Pattern() = default;
    Pattern(int d, int side, int alphabet)
        : d_(d), side_(side), alphabet_(alphabet),
          v_(static_cast<std::size_t>(ipow(static_cast<std::uint64_t>(side) + 1, static_cast<unsigned>(d))), 0) {
        if (d < 1 || d > kMaxDim) throw ValidationError("pattern dimension out of range");
        if (side < 0) throw ValidationError("pattern side must be >= 0");
        if (alphabet < 1) throw ValidationError("alphabet size must be >= 1");
    }

    int dim() const { return d_; }
    int side() const { return side_; }
    int alphabet() const { return alphabet_; }
    long long site_count() const { return static_cast<long long>(v_.size()); }
    const std::vector<Symbol>& values() const { return v_; }
    std::vector<Symbol>& values() { return v_; }

    long long flat(const LatticeVector& rel) const {
        long long idx = 0;
        for (int i = 0; i < d_; ++i) idx = idx * (side_ + 1) + rel[i];
        return idx;
    }
    Symbol at(const LatticeVector& rel) const { return v_[static_cast<std::size_t>(flat(rel))]; }
    void set(const LatticeVector& rel, Symbol s) { v_[static_cast<std::size_t>(flat(rel))] = s; }

    bool operator==(const Pattern& o) const {
        return d_ == o.d_ && side_ == o.side_ && alphabet_ == o.alphabet_ && v_ == o.v_;
    }

    std::uint64_t hash() const {
        const int hdr[3] = {d_, side_, alphabet_};
        std::uint64_t h = fnv1a(hdr, sizeof hdr);
        return fnv1a(v_.data(), v_.size(), h);
    }

    // Text form: header "d n |A|", then row-major symbol indices.
    std::string to_text() const;
    static Pattern from_text(const std::string& text);
    std::string to_json_string() const;
    static Pattern from_json_string(const std::string& text);

    static Pattern constant(int d, int side, int alphabet, Symbol s) {
        Pattern p(d, side, alphabet);
        std::fill(p.v_.begin(), p.v_.end(), s);
        return p;
    }
    static Pattern random(int d, int side, int alphabet, class Rng& rng);

private:
    int d_ = 1;
    int side_ = 0;
    int alphabet_ = 2;
    std::vector<Symbol> v_;
};

// Enumerates the sites of [0,n]^d in row-major order (last axis fastest).
class SiteIterator {
public:
    SiteIterator(int d, int side) : d_(d), side_(side), cur_(LatticeVector::zero(d)) {}
    bool done() const { return done_; }
    const LatticeVector& operator*() const { return cur_; }
    void advance() {
        for (int i = d_ - 1; i >= 0; --i) {
            if (cur_[i] < side_) {
                ++cur_[i];
                return;
            }
            cur_[i] = 0;
        }
        done_ = true;
    }

private:
    int d_;
    int side_;
    LatticeVector cur_;
    bool done_ = false;
};

// tau_x sigma: result(y) = source(x + y). Box domains shift (origin - x);
// torus domains keep their support and rotate values.
Configuration translate(const Configuration& source, const LatticeVector& x);

// Copies the box out of the configuration; throws if not contained.
Configuration restrict_to(const Configuration& source, const Box& box);

// sigma_{C_n} as a Pattern (absolute sites [0,n]^d must be in the domain).
Pattern restrict_pattern(const Configuration& source, int n);

Configuration pattern_as_configuration(const Pattern& p);

// True when the pattern equals the configuration on x + C_n. With wrap the
// placement may cross a torus seam.
bool pattern_matches_at(const Pattern& a, const Configuration& sigma, const LatticeVector& x, bool wrap = false);

// A is present in the region: some placement x + C_n inside the region
// matches. Regions too small for any placement give false.
bool pattern_present(const Pattern& a, const Configuration& sigma, const Box& region, bool wrap = false);

}  // namespace gibbslab

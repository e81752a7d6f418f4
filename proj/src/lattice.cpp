#include "gibbslab/lattice.hpp"

#include <sstream>

#include "gibbslab/rng.hpp"
#include "json.hpp"

namespace gibbslab {

std::uint64_t Configuration::content_hash() const {
    const int hdr[4] = {d_, ext_, alphabet_, torus_ ? 1 : 0};
    std::uint64_t h = fnv1a(hdr, sizeof hdr);
    return fnv1a(v_.data(), v_.size(), h);
}

std::string Configuration::to_json_string() const {
    nlohmann::json j;
    j["d"] = d_;
    j["domain"] = torus_ ? "torus" : "box";
    j["extent"] = ext_;
    j["alphabet"] = alphabet_;
    std::vector<int> origin(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) origin[static_cast<std::size_t>(i)] = origin_[i];
    j["origin"] = origin;
    std::vector<int> vals(v_.begin(), v_.end());
    j["values"] = vals;
    return j.dump();
}

Configuration Configuration::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const int d = j.at("d").get<int>();
    const int extent = j.at("extent").get<int>();
    const int alphabet = j.at("alphabet").get<int>();
    const bool torus = j.at("domain").get<std::string>() == "torus";
    Configuration c = torus ? Configuration::torus(d, extent, alphabet)
                            : Configuration::box(d, LatticeVector::of(j.at("origin").get<std::vector<int>>()),
                                                 extent, alphabet);
    const auto vals = j.at("values").get<std::vector<int>>();
    if (static_cast<long long>(vals.size()) != c.site_count())
        throw ValidationError("configuration json: wrong value count");
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < 0 || vals[i] >= alphabet) throw ValidationError("configuration json: symbol out of range");
        c.values()[i] = static_cast<Symbol>(vals[i]);
    }
    return c;
}

std::string Pattern::to_text() const {
    std::ostringstream os;
    os << d_ << ' ' << side_ << ' ' << alphabet_ << '\n';
    for (std::size_t i = 0; i < v_.size(); ++i) {
        os << static_cast<int>(v_[i]);
        os << (i + 1 == v_.size() ? '\n' : ' ');
    }
    return os.str();
}

Pattern Pattern::from_text(const std::string& text) {
    std::istringstream is(text);
    int d = 0, side = -1, alphabet = 0;
    if (!(is >> d >> side >> alphabet)) throw ValidationError("pattern text: bad header, expected 'd n |A|'");
    Pattern p(d, side, alphabet);
    for (auto& s : p.v_) {
        int sym;
        if (!(is >> sym)) throw ValidationError("pattern text: not enough symbols");
        if (sym < 0 || sym >= alphabet) throw ValidationError("pattern text: symbol out of alphabet range");
        s = static_cast<Symbol>(sym);
    }
    int extra;
    if (is >> extra) throw ValidationError("pattern text: trailing symbols");
    return p;
}

std::string Pattern::to_json_string() const {
    nlohmann::json j;
    j["d"] = d_;
    j["n"] = side_;
    j["alphabet"] = alphabet_;
    std::vector<int> vals(v_.begin(), v_.end());
    j["values"] = vals;
    return j.dump();
}

Pattern Pattern::from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Pattern p(j.at("d").get<int>(), j.at("n").get<int>(), j.at("alphabet").get<int>());
    const auto vals = j.at("values").get<std::vector<int>>();
    if (vals.size() != p.v_.size()) throw ValidationError("pattern json: wrong value count");
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] < 0 || vals[i] >= p.alphabet_) throw ValidationError("pattern json: symbol out of range");
        p.v_[i] = static_cast<Symbol>(vals[i]);
    }
    return p;
}

Pattern Pattern::random(int d, int side, int alphabet, Rng& rng) {
    Pattern p(d, side, alphabet);
    for (auto& s : p.values()) s = static_cast<Symbol>(rng.next_below(static_cast<std::uint64_t>(alphabet)));
    return p;
}

Configuration translate(const Configuration& source, const LatticeVector& x) {
    if (x.dim() != source.dim()) throw ValidationError("translate: dimension mismatch");
    if (source.is_torus()) {
        Configuration out = source;
        SiteIterator it(source.dim(), source.extent() - 1);
        for (; !it.done(); it.advance()) {
            out.set(*it, source.at(*it + x));
        }
        return out;
    }
    Configuration out = Configuration::box(source.dim(), source.origin() - x, source.extent(), source.alphabet());
    out.values() = source.values();
    return out;
}

Configuration restrict_to(const Configuration& source, const Box& box) {
    if (box.dim() != source.dim()) throw ValidationError("restrict: dimension mismatch");
    if (!source.contains_box(box)) throw ValidationError("restrict: box not contained in domain");
    Configuration out = Configuration::box(source.dim(), box.origin, box.side + 1, source.alphabet());
    SiteIterator it(box.dim(), box.side);
    for (; !it.done(); it.advance()) {
        out.set(box.origin + *it, source.at(box.origin + *it));
    }
    return out;
}

Pattern restrict_pattern(const Configuration& source, int n) {
    const Box cn = Box::cube(source.dim(), n);
    if (!source.contains_box(cn)) throw ValidationError("restrict_pattern: C_n not contained in domain");
    Pattern p(source.dim(), n, source.alphabet());
    SiteIterator it(source.dim(), n);
    for (; !it.done(); it.advance()) p.set(*it, source.at(*it));
    return p;
}

Configuration pattern_as_configuration(const Pattern& p) {
    Configuration c = Configuration::cube(p.dim(), p.side(), p.alphabet());
    c.values() = p.values();
    return c;
}

namespace {

// Fast row-wise match for box configurations: pattern rows are contiguous and
// so are the corresponding config segments.
bool match_rows(const Pattern& a, const Configuration& sigma, const LatticeVector& x) {
    const int d = a.dim();
    const int pside = a.side();
    const int rowlen = pside + 1;
    const int ext = sigma.extent();
    // relative coordinates of the placement origin inside sigma's storage
    long long base = 0;
    for (int i = 0; i < d; ++i) {
        const long long rel = x[i] - sigma.origin()[i];
        if (rel < 0 || rel + pside >= ext) return false;
        base = base * ext + rel;
    }
    const Symbol* cfg = sigma.data();
    const Symbol* pat = a.values().data();
    if (d == 1) {
        return std::memcmp(cfg + base, pat, static_cast<std::size_t>(rowlen)) == 0;
    }
    if (d == 2) {
        for (int r = 0; r <= pside; ++r) {
            if (std::memcmp(cfg + base + static_cast<long long>(r) * ext, pat + static_cast<long long>(r) * rowlen,
                            static_cast<std::size_t>(rowlen)) != 0)
                return false;
        }
        return true;
    }
    for (int r1 = 0; r1 <= pside; ++r1) {
        for (int r2 = 0; r2 <= pside; ++r2) {
            const long long cfg_off = base + (static_cast<long long>(r1) * ext + r2) * ext;
            const long long pat_off = (static_cast<long long>(r1) * rowlen + r2) * rowlen;
            if (std::memcmp(cfg + cfg_off, pat + pat_off, static_cast<std::size_t>(rowlen)) != 0) return false;
        }
    }
    return true;
}

}  // namespace

bool pattern_matches_at(const Pattern& a, const Configuration& sigma, const LatticeVector& x, bool wrap) {
    if (a.dim() != sigma.dim()) throw ValidationError("pattern_matches_at: dimension mismatch");
    if (!wrap || !sigma.is_torus()) {
        if (!sigma.is_torus()) return match_rows(a, sigma, x);
        // torus, no wrap: placement must fit inside the fundamental domain
        for (int i = 0; i < a.dim(); ++i) {
            if (x[i] < 0 || x[i] + a.side() >= sigma.extent()) return false;
        }
        return match_rows(a, sigma, x);
    }
    SiteIterator it(a.dim(), a.side());
    for (; !it.done(); it.advance()) {
        if (sigma.at(x + *it) != a.at(*it)) return false;
    }
    return true;
}

bool pattern_present(const Pattern& a, const Configuration& sigma, const Box& region, bool wrap) {
    const int d = a.dim();
    const int span = region.side - a.side();
    if (span < 0) return false;
    SiteIterator it(d, span);
    for (; !it.done(); it.advance()) {
        if (pattern_matches_at(a, sigma, region.origin + *it, wrap)) return true;
    }
    return false;
}

}  // namespace gibbslab

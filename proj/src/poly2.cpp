#include "pcs/poly2.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pcs {

Poly2 Poly2::constant(const Rat& q) {
    Poly2 p;
    if (q != 0) p.c[{0, 0}] = q;
    return p;
}

Poly2 Poly2::monomial(int a, int b, const Rat& q) {
    Poly2 p;
    if (q != 0) p.c[{a, b}] = q;
    return p;
}

int Poly2::degree() const {
    int d = -1;
    for (const auto& [m, v] : c) d = std::max(d, m.first + m.second);
    return d;
}

int Poly2::order() const {
    if (c.empty()) return -1;
    int d = 1 << 30;
    for (const auto& [m, v] : c) d = std::min(d, m.first + m.second);
    return d;
}

Poly2 Poly2::operator+(const Poly2& o) const {
    Poly2 r = *this;
    for (const auto& [m, v] : o.c) {
        auto it = r.c.find(m);
        if (it == r.c.end()) {
            r.c[m] = v;
        } else {
            it->second += v;
            if (it->second == 0) r.c.erase(it);
        }
    }
    return r;
}

Poly2 Poly2::operator-(const Poly2& o) const {
    Poly2 neg;
    for (const auto& [m, v] : o.c) neg.c[m] = -v;
    return *this + neg;
}

Poly2 Poly2::operator*(const Poly2& o) const {
    Poly2 r;
    for (const auto& [ma, va] : c) {
        for (const auto& [mb, vb] : o.c) {
            auto key = std::make_pair(ma.first + mb.first, ma.second + mb.second);
            auto it = r.c.find(key);
            if (it == r.c.end()) {
                Rat p = va * vb;
                if (p != 0) r.c[key] = p;
            } else {
                it->second += va * vb;
                if (it->second == 0) r.c.erase(it);
            }
        }
    }
    return r;
}

Poly2 Poly2::pow(int n) const {
    if (n < 0) throw std::invalid_argument("negative power");
    Poly2 r = Poly2::constant(Rat(1));
    Poly2 base = *this;
    while (n > 0) {
        if (n & 1) r = r * base;
        base = base * base;
        n >>= 1;
    }
    return r;
}

Poly2 Poly2::dx() const {
    Poly2 r;
    for (const auto& [m, v] : c)
        if (m.first > 0) r.c[{m.first - 1, m.second}] = v * m.first;
    return r;
}

Poly2 Poly2::dy() const {
    Poly2 r;
    for (const auto& [m, v] : c)
        if (m.second > 0) r.c[{m.first, m.second - 1}] = v * m.second;
    return r;
}

std::string Poly2::str() const {
    if (c.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, v] : c) {
        Rat a = v;
        bool neg = a < 0;
        if (neg) a = -a;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        bool one = (a == 1) && (m.first + m.second > 0);
        if (!one) os << rat_to_string(a);
        bool star = !one;
        if (m.first > 0) {
            if (star) os << "*";
            os << "x";
            if (m.first > 1) os << "^" << m.first;
            star = true;
        }
        if (m.second > 0) {
            if (star) os << "*";
            os << "y";
            if (m.second > 1) os << "^" << m.second;
        }
    }
    return os.str();
}

namespace {

struct PolyParser {
    const std::string& s;
    size_t i = 0;

    explicit PolyParser(const std::string& t) : s(t) {}

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }

    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }

    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("polynomial parse error at position " +
                                    std::to_string(i) + ": " + what);
    }

    Poly2 parse_expr() {
        Poly2 r;
        bool neg = eat('-');
        if (!neg) eat('+');
        r = parse_term();
        if (neg) r = Poly2::zero() - r;
        while (true) {
            if (eat('+')) {
                r = r + parse_term();
            } else if (eat('-')) {
                r = r - parse_term();
            } else {
                break;
            }
        }
        return r;
    }

    Poly2 parse_term() {
        Poly2 r = parse_factor();
        while (eat('*')) r = r * parse_factor();
        return r;
    }

    Poly2 parse_factor() {
        Poly2 base = parse_atom();
        if (eat('^')) {
            skip();
            size_t start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (start == i) fail("expected exponent");
            base = base.pow(std::stoi(s.substr(start, i - start)));
        }
        return base;
    }

    Poly2 parse_atom() {
        char c = peek();
        if (c == '(') {
            eat('(');
            Poly2 r = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (c == 'x') {
            ++i;
            return Poly2::monomial(1, 0);
        }
        if (c == 'y') {
            ++i;
            return Poly2::monomial(0, 1);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i < s.size() && s[i] == '/') {
                ++i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            }
            return Poly2::constant(rat_from_string(s.substr(start, i - start)));
        }
        fail("unexpected character");
    }
};

// Univariate helpers for the gcd, coefficients indexed by degree.
using Poly1 = std::vector<Rat>;

void trim1(Poly1& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly1 mul1(const Poly1& a, const Poly1& b) {
    if (a.empty() || b.empty()) return {};
    Poly1 r(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim1(r);
    return r;
}

Poly1 sub1(Poly1 a, const Poly1& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rat(0));
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim1(a);
    return a;
}

// Remainder of a by b over the rationals.
Poly1 rem1(Poly1 a, const Poly1& b) {
    trim1(a);
    if (b.empty()) throw std::domain_error("univariate division by zero");
    while (a.size() >= b.size()) {
        Rat q = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= q * b[i];
        trim1(a);
        if (a.empty()) break;
    }
    return a;
}

Poly1 gcd1(Poly1 a, Poly1 b) {
    trim1(a);
    trim1(b);
    while (!b.empty()) {
        Poly1 r = rem1(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rat lead = a.back();
        for (auto& v : a) v /= lead;
    }
    return a;
}

// View of a Poly2 as a polynomial in y with coefficients in Q[x].
using PolyYX = std::vector<Poly1>;  // index = y-degree

PolyYX to_yx(const Poly2& p) {
    PolyYX r;
    for (const auto& [m, v] : p.c) {
        if (r.size() <= static_cast<size_t>(m.second)) r.resize(m.second + 1);
        auto& cf = r[m.second];
        if (cf.size() <= static_cast<size_t>(m.first)) cf.resize(m.first + 1, Rat(0));
        cf[m.first] = v;
    }
    for (auto& cf : r) trim1(cf);
    while (!r.empty() && r.back().empty()) r.pop_back();
    return r;
}

Poly2 from_yx(const PolyYX& p) {
    Poly2 r;
    for (size_t b = 0; b < p.size(); ++b)
        for (size_t a = 0; a < p[b].size(); ++a)
            if (p[b][a] != 0) r.c[{static_cast<int>(a), static_cast<int>(b)}] = p[b][a];
    return r;
}

Poly1 content_yx(const PolyYX& p) {
    Poly1 g;
    for (const auto& cf : p)
        if (!cf.empty()) g = gcd1(g, cf);
    return g;
}

Poly1 div1_exact(const Poly1& a, const Poly1& b) {
    Poly1 q(a.size() > b.size() - 1 ? a.size() - b.size() + 1 : 0, Rat(0));
    Poly1 rem = a;
    trim1(rem);
    while (rem.size() >= b.size()) {
        Rat c = rem.back() / b.back();
        size_t shift = rem.size() - b.size();
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) rem[shift + i] -= c * b[i];
        trim1(rem);
    }
    if (!rem.empty()) throw std::domain_error("inexact univariate division");
    trim1(q);
    return q;
}

PolyYX primitive_part(const PolyYX& p) {
    Poly1 cont = content_yx(p);
    if (cont.empty()) return p;
    PolyYX r = p;
    for (auto& cf : r)
        if (!cf.empty()) cf = div1_exact(cf, cont);
    return r;
}

PolyYX scale_yx(const PolyYX& p, const Poly1& f) {
    PolyYX r = p;
    for (auto& cf : r) cf = mul1(cf, f);
    while (!r.empty() && r.back().empty()) r.pop_back();
    return r;
}

// Pseudo-remainder in y over Q[x].
PolyYX prem_yx(PolyYX a, const PolyYX& b) {
    while (!a.empty() && a.back().empty()) a.pop_back();
    if (b.empty()) throw std::domain_error("bivariate division by zero");
    const Poly1& lead = b.back();
    while (a.size() >= b.size()) {
        Poly1 la = a.back();
        size_t shift = a.size() - b.size();
        // lead * a - la * y^shift * b
        a = scale_yx(a, lead);
        PolyYX sub(b.size() + shift);
        for (size_t i = 0; i < b.size(); ++i) sub[i + shift] = mul1(b[i], la);
        if (a.size() < sub.size()) a.resize(sub.size());
        for (size_t i = 0; i < sub.size(); ++i) a[i] = sub1(a[i], sub[i]);
        while (!a.empty() && a.back().empty()) a.pop_back();
    }
    return a;
}

}  // namespace

Poly2 parse_poly2(const std::string& text) {
    PolyParser p(text);
    Poly2 r = p.parse_expr();
    p.skip();
    if (p.i != text.size()) p.fail("trailing input");
    return r;
}

Poly2 poly2_gcd(const Poly2& a, const Poly2& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    PolyYX pa = to_yx(a), pb = to_yx(b);
    // Both free of y: univariate gcd in x.
    if (pa.size() <= 1 && pb.size() <= 1) {
        Poly1 g = gcd1(pa.empty() ? Poly1{} : pa[0], pb.empty() ? Poly1{} : pb[0]);
        return from_yx({g});
    }
    Poly1 ca = content_yx(pa), cb = content_yx(pb);
    PolyYX u = primitive_part(pa), v = primitive_part(pb);
    if (u.size() < v.size()) std::swap(u, v);
    while (true) {
        bool v_zero = true;
        for (const auto& cf : v) v_zero &= cf.empty();
        if (v_zero) break;
        PolyYX r = prem_yx(u, v);
        u = std::move(v);
        v = primitive_part(r);
        while (!v.empty() && v.back().empty()) v.pop_back();
    }
    PolyYX g = primitive_part(u);
    return from_yx(scale_yx(g, gcd1(ca, cb)));
}

bool poly2_squarefree(const Poly2& f) {
    if (f.is_zero()) return false;
    Poly2 g = poly2_gcd(poly2_gcd(f, f.dx()), f.dy());
    return g.degree() == 0;
}

namespace {

// Column indices for monomials of total degree <= D, graded lexicographic.
int mono_index(int a, int b) {
    int d = a + b;
    return d * (d + 1) / 2 + b;
}

int count_monomials(int D) { return (D + 1) * (D + 2) / 2; }

using SparseRow = std::map<int, Rat>;

// Rank by exact Gaussian elimination. Rows are kept in buckets keyed by their
// leading column; eliminating a row only moves it to a later bucket, so each
// column is visited once.
int sparse_rank(std::vector<SparseRow>& rows) {
    std::map<int, std::vector<size_t>> buckets;
    for (size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].empty()) buckets[rows[i].begin()->first].push_back(i);
    int rank = 0;
    while (!buckets.empty()) {
        auto it = buckets.begin();
        std::vector<size_t> here = std::move(it->second);
        buckets.erase(it);
        size_t pivot = here[0];
        for (size_t r : here)
            if (rows[r].size() < rows[pivot].size()) pivot = r;
        ++rank;
        const SparseRow& prow = rows[pivot];
        Rat pval = prow.begin()->second;
        for (size_t r : here) {
            if (r == pivot) continue;
            Rat factor = rows[r].begin()->second / pval;
            for (const auto& [c2, v2] : prow) {
                auto jt = rows[r].find(c2);
                if (jt == rows[r].end()) {
                    rows[r][c2] = -factor * v2;
                } else {
                    jt->second -= factor * v2;
                    if (jt->second == 0) rows[r].erase(jt);
                }
            }
            if (!rows[r].empty()) buckets[rows[r].begin()->first].push_back(r);
        }
    }
    return rank;
}

// dim of Q[x,y] / ((f_x, f_y) + m^{D+1}).
int jet_dimension(const Poly2& fx, const Poly2& fy, int D) {
    std::vector<SparseRow> rows;
    for (const Poly2* g : {&fx, &fy}) {
        if (g->is_zero()) continue;
        int og = g->order();
        for (int a = 0; a + og <= D; ++a) {
            for (int b = 0; a + b + og <= D; ++b) {
                SparseRow row;
                for (const auto& [m, v] : g->c) {
                    int da = m.first + a, db = m.second + b;
                    if (da + db > D) continue;
                    row[mono_index(da, db)] = v;
                }
                if (!row.empty()) rows.push_back(std::move(row));
            }
        }
    }
    return count_monomials(D) - sparse_rank(rows);
}

}  // namespace

int milnor_number_poly(const Poly2& f) {
    constexpr int kCap = 512;
    Poly2 fx = f.dx(), fy = f.dy();
    if (fx.is_zero() && fy.is_zero())
        throw std::runtime_error("non-isolated or cap exceeded");
    int D = std::max(2, 2 * f.degree());
    int prev = jet_dimension(fx, fy, D);
    while (true) {
        int next_D = 2 * D;
        if (next_D > kCap) throw std::runtime_error("non-isolated or cap exceeded");
        int cur = jet_dimension(fx, fy, next_D);
        if (cur == prev) return cur;
        prev = cur;
        D = next_D;
    }
}

}  // namespace pcs

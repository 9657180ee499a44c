#include "pcs/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pcs {

Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        bool ok = std::isdigit(static_cast<unsigned char>(c)) || c == '/' ||
                  (c == '-' && (i == 0 || s[i - 1] == '/'));
        if (!ok) throw std::invalid_argument("malformed rational: " + s);
    }
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    return c.get_str();
}

namespace {

struct Registry {
    std::vector<std::string> names;
    std::map<std::string, int> index;
    Registry() {
        names.push_back("tau");
        index["tau"] = 0;
    }
};

Registry& reg() {
    static Registry r;
    return r;
}

bool valid_symbol_name(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

}  // namespace

int SymbolTable::declare(const std::string& name) {
    if (!valid_symbol_name(name)) throw std::invalid_argument("bad symbol name: " + name);
    auto& r = reg();
    auto it = r.index.find(name);
    if (it != r.index.end()) return it->second;
    r.names.push_back(name);
    int id = static_cast<int>(r.names.size()) - 1;
    r.index[name] = id;
    return id;
}

int SymbolTable::lookup(const std::string& name) {
    auto& r = reg();
    auto it = r.index.find(name);
    if (it == r.index.end()) throw UnknownSymbol(name);
    return it->second;
}

const std::string& SymbolTable::name(int id) {
    return reg().names.at(static_cast<size_t>(id));
}

bool SymbolTable::is_declared(const std::string& name) {
    return reg().index.count(name) > 0;
}

int SymbolTable::tau_id() { return 0; }

Scalar::Scalar(long v) {
    if (v != 0) terms_[{}] = Rat(v);
}

Scalar::Scalar(const Rat& v) {
    if (v != 0) terms_[{}] = v;
}

Scalar Scalar::symbol(const std::string& name) {
    int id = SymbolTable::lookup(name);
    Scalar s;
    s.terms_[{{id, 1}}] = Rat(1);
    return s;
}

Scalar Scalar::tau(int power) {
    Scalar s;
    if (power == 0) {
        s.terms_[{}] = Rat(1);
    } else {
        s.terms_[{{SymbolTable::tau_id(), power}}] = Rat(1);
    }
    return s;
}

bool Scalar::is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rat Scalar::rational_value() const {
    if (terms_.empty()) return Rat(0);
    if (!is_rational()) throw std::domain_error("scalar is not rational: " + str());
    return terms_.begin()->second;
}

void Scalar::add_term(const Mono& m, const Rat& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (c != 0) terms_[m] = c;
        return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

Scalar Scalar::operator-() const {
    Scalar r;
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

namespace {

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            int e = a[i].second + b[j].second;
            if (e != 0) out.emplace_back(a[i].first, e);
            ++i;
            ++j;
        }
    }
    for (const auto& [id, e] : out) {
        if (e < 0 && id != SymbolTable::tau_id())
            throw std::domain_error("negative exponent on non-invertible symbol " +
                                    SymbolTable::name(id));
    }
    return out;
}

}  // namespace

Scalar& Scalar::operator*=(const Scalar& o) {
    Scalar r;
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
    terms_ = std::move(r.terms_);
    return *this;
}

Scalar& Scalar::operator*=(const Rat& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Scalar Scalar::operator/(const Rat& c) const {
    if (c == 0) throw std::domain_error("division by zero");
    Scalar r = *this;
    Rat inv = Rat(1) / c;
    return r *= inv;
}

int Scalar::cmp(const Scalar& o) const {
    auto ia = terms_.begin(), ib = o.terms_.begin();
    while (ia != terms_.end() && ib != o.terms_.end()) {
        if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
        ++ia;
        ++ib;
    }
    if (ia != terms_.end()) return 1;
    if (ib != o.terms_.end()) return -1;
    return 0;
}

Scalar Scalar::inverse() const {
    if (terms_.size() != 1)
        throw std::domain_error("scalar is not invertible: " + str());
    const auto& [m, c] = *terms_.begin();
    for (const auto& [id, e] : m) {
        (void)e;
        if (id != SymbolTable::tau_id())
            throw std::domain_error("scalar is not invertible: " + str());
    }
    Scalar r;
    Mono inv = m;
    for (auto& [id, e] : inv) e = -e;
    r.terms_[inv] = Rat(1) / c;
    return r;
}

Scalar Scalar::substitute(const std::map<std::string, Scalar>& values) const {
    std::map<int, Scalar> by_id;
    for (const auto& [name, v] : values) by_id[SymbolTable::lookup(name)] = v;
    Scalar out;
    for (const auto& [m, c] : terms_) {
        Scalar term(c);
        Mono untouched;
        for (const auto& [id, e] : m) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                untouched.emplace_back(id, e);
                continue;
            }
            if (e < 0) {
                Scalar inv = it->second.inverse();
                for (int k = 0; k < -e; ++k) term *= inv;
            } else {
                for (int k = 0; k < e; ++k) term *= it->second;
            }
        }
        Scalar mono;
        mono.terms_[untouched] = Rat(1);
        out += term * mono;
    }
    return out;
}

std::complex<double> Scalar::to_complex(
    const std::map<std::string, std::complex<double>>& values) const {
    std::complex<double> out(0.0, 0.0);
    for (const auto& [m, c] : terms_) {
        std::complex<double> term(c.get_d(), 0.0);
        for (const auto& [id, e] : m) {
            const std::string& nm = SymbolTable::name(id);
            std::complex<double> base;
            auto it = values.find(nm);
            if (it != values.end()) {
                base = it->second;
            } else if (id == SymbolTable::tau_id()) {
                base = std::complex<double>(0.0, 2.0 * std::numbers::pi);
            } else {
                throw std::domain_error("no numeric value for symbol " + nm);
            }
            term *= std::pow(base, e);
        }
        out += term;
    }
    return out;
}

std::string Scalar::str() const {
    if (terms_.empty()) return "0";
    // Sort terms by symbol names so output does not depend on declaration order.
    std::vector<std::pair<std::vector<std::pair<std::string, int>>, Rat>> named;
    named.reserve(terms_.size());
    for (const auto& [m, c] : terms_) {
        std::vector<std::pair<std::string, int>> nm;
        nm.reserve(m.size());
        for (const auto& [id, e] : m) nm.emplace_back(SymbolTable::name(id), e);
        std::sort(nm.begin(), nm.end());
        named.emplace_back(std::move(nm), c);
    }
    std::sort(named.begin(), named.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : named) {
        Rat a = c;
        bool neg = a < 0;
        if (neg) a = -a;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        bool coeff_one = (a == 1) && !m.empty();
        if (!coeff_one) os << rat_to_string(a);
        bool need_star = !coeff_one;
        for (const auto& [nm, e] : m) {
            if (need_star) os << "*";
            os << nm;
            if (e != 1) os << "^" << e;
            need_star = true;
        }
    }
    return os.str();
}

namespace {

// Minimal reader for the canonical scalar format produced by Scalar::str.
struct ScalarReader {
    const std::string& s;
    size_t i = 0;

    explicit ScalarReader(const std::string& text) : s(text) {}

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }

    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }

    Rat read_rat() {
        skip_ws();
        size_t start = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i < s.size() && s[i] == '/') {
            ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
        return rat_from_string(s.substr(start, i - start));
    }

    int read_int() {
        skip_ws();
        size_t start = i;
        if (i < s.size() && s[i] == '-') ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (start == i) throw std::invalid_argument("expected integer in scalar: " + s);
        return std::stoi(s.substr(start, i - start));
    }

    std::string read_name() {
        skip_ws();
        size_t start = i;
        while (i < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
            ++i;
        if (start == i) throw std::invalid_argument("expected symbol in scalar: " + s);
        return s.substr(start, i - start);
    }

    Scalar read_term(bool negate) {
        skip_ws();
        Rat coeff(1);
        bool saw_coeff = false;
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            coeff = read_rat();
            saw_coeff = true;
        }
        Scalar term(coeff);
        bool expect_sym = !saw_coeff;
        while (true) {
            skip_ws();
            if (expect_sym || eat('*')) {
                expect_sym = false;
                std::string nm = read_name();
                int e = 1;
                if (eat('^')) e = read_int();
                int id = SymbolTable::lookup(nm);
                Scalar p;
                if (e >= 0) {
                    p = 1;
                    Scalar base = Scalar::symbol(nm);
                    for (int k = 0; k < e; ++k) p *= base;
                } else {
                    if (id != SymbolTable::tau_id())
                        throw std::domain_error("negative exponent on non-invertible symbol " + nm);
                    p = Scalar::tau(e);
                }
                term *= p;
            } else {
                break;
            }
        }
        return negate ? -term : term;
    }

    Scalar read_sum() {
        Scalar out;
        bool neg = eat('-');
        out += read_term(neg);
        while (true) {
            skip_ws();
            if (eat('+')) {
                out += read_term(false);
            } else if (eat('-')) {
                out += read_term(true);
            } else {
                break;
            }
        }
        skip_ws();
        if (i != s.size()) throw std::invalid_argument("trailing input in scalar: " + s);
        return out;
    }
};

}  // namespace

Scalar Scalar::parse(const std::string& text) {
    ScalarReader r(text);
    return r.read_sum();
}

}  // namespace pcs

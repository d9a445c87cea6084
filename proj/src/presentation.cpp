#include "tl/presentation.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <numeric>

namespace tl {

Word parse_word(std::string_view text, int rank)
{
    Word w;
    w.reserve(text.size());
    for (char c : text) {
        if (!std::isalpha(static_cast<unsigned char>(c)))
            throw InputError("invalid letter '" + std::string(1, c) + "' in word");
        const bool inv = std::isupper(static_cast<unsigned char>(c));
        const int g = std::tolower(static_cast<unsigned char>(c)) - 'a';
        if (g >= rank)
            throw InputError("letter '" + std::string(1, c) + "' exceeds generator count " +
                             std::to_string(rank));
        w.push_back({g, inv ? -1 : 1});
    }
    return w;
}

std::string to_string(const Word& w)
{
    std::string s;
    for (auto l : w) s.push_back(static_cast<char>(l.exp > 0 ? 'a' + l.gen : 'A' + l.gen));
    return s;
}

Word reduce(Word w)
{
    Word out;
    out.reserve(w.size());
    for (auto l : w) {
        if (!out.empty() && out.back().gen == l.gen && out.back().exp == -l.exp)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

Word inverse(const Word& w)
{
    Word r(w.rbegin(), w.rend());
    for (auto& l : r) l.exp = -l.exp;
    return r;
}

Word concat(const Word& a, const Word& b)
{
    Word r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

Presentation presentation_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw InputError("manifold file must hold a JSON object");
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
        return j.at(key);
    };
    Presentation p;
    try {
        p.name = need("name").get<std::string>();
        p.rank = need("generators").get<int>();
        if (p.rank < 1) throw InputError("generators must be at least 1");
        const auto& rel = need("relators");
        if (!rel.is_array()) throw InputError("relators must be an array");
        for (const auto& r : rel) {
            auto w = reduce(parse_word(r.get<std::string>(), p.rank));
            if (w.empty()) throw InputError("relator reduces to the empty word");
            p.relators.push_back(std::move(w));
        }
        const auto mu = need("meridian").get<std::string>();
        const auto la = need("longitude").get<std::string>();
        if (mu.empty() || la.empty()) throw InputError("peripheral words must be nonempty");
        p.meridian = reduce(parse_word(mu, p.rank));
        p.longitude = reduce(parse_word(la, p.rank));
        if (j.contains("genus")) {
            p.genus = j.at("genus").get<int>();
            if (*p.genus < 1) throw InputError("genus must be positive");
        }
        if (j.contains("assume_small")) p.assume_small = j.at("assume_small").get<bool>();
        if (j.contains("comment")) p.comment = j.at("comment").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("schema violation: ") + e.what());
    }
    if (p.relators.empty() && p.rank > 1) throw InputError("empty relator list with rank > 1");
    const int deficiency = p.rank - static_cast<int>(p.relators.size());
    if (deficiency != 0 && deficiency != 1)
        throw InputError("deficiency " + std::to_string(deficiency) + " is not 0 or 1");
    return p;
}

Presentation parse_manifold(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return presentation_from_json(j);
}

IntVector exponent_sums(const Word& w, int rank)
{
    IntVector v(static_cast<std::size_t>(rank), 0);
    for (auto l : w) v[static_cast<std::size_t>(l.gen)] += l.exp;
    return v;
}

IntMatrix exponent_matrix(const Presentation& p)
{
    IntMatrix m;
    for (const auto& r : p.relators) m.push_back(exponent_sums(r, p.rank));
    return m;
}

HomologyData abelianization_data(const Presentation& p)
{
    const auto cols = static_cast<std::size_t>(p.rank);
    const auto f = smith_normal_form(exponent_matrix(p), cols);
    HomologyData h;
    h.free_rank = p.rank - f.rank;
    if (h.free_rank != 1)
        throw InputError("free rank of H1 is " + std::to_string(h.free_rank) + ", expected 1");
    for (int i = 0; i < f.rank; ++i) {
        const auto d = f.D[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        h.torsion_order *= d;
        if (d > 1) h.torsion_invariants.push_back(d);
    }

    // coordinates of a word in the Smith basis are x^T V
    auto coords = [&](const Word& w) {
        const auto e = exponent_sums(w, p.rank);
        IntVector y(cols, 0);
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t g = 0; g < cols; ++g) y[c] += e[g] * f.V[g][c];
        return y;
    };
    const auto free_col = static_cast<std::size_t>(f.rank);
    h.free_images.resize(cols);
    for (std::size_t g = 0; g < cols; ++g) h.free_images[g] = f.V[g][free_col];
    std::int64_t mu = free_image(h, p.meridian);
    if (mu == 0) throw InputError("meridian has trivial image in the free quotient of H1");
    if (mu < 0) {
        for (auto& x : h.free_images) x = -x;
        mu = -mu;
    }
    h.mu_index = mu;
    if (free_image(h, p.longitude) != 0)
        throw InputError("longitude is not torsion in H1");

    const auto y = coords(p.longitude);
    h.k = 1;
    for (int i = 0; i < f.rank; ++i) {
        const auto d = f.D[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        const auto r = ((y[static_cast<std::size_t>(i)] % d) + d) % d;
        const auto ord = d / std::gcd(r, d);
        h.k = std::lcm(h.k, ord);
    }
    if (h.mu_index != h.k)
        throw InputError("meridian index " + std::to_string(h.mu_index) +
                         " differs from longitude order " + std::to_string(h.k) +
                         "; peripheral framing is not homologically natural");
    return h;
}

std::int64_t free_image(const HomologyData& h, const Word& w)
{
    std::int64_t s = 0;
    for (auto l : w) s += l.exp * h.free_images[static_cast<std::size_t>(l.gen)];
    return s;
}

}  // namespace tl

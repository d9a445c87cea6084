#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tl/intmat.hpp"

namespace tl {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Letter {
    int gen = 0;
    int exp = 1;  // +1 or -1
    bool operator==(const Letter&) const = default;
};

using Word = std::vector<Letter>;

// Letters a..z are generators, A..Z their inverses.
Word parse_word(std::string_view text, int rank);
std::string to_string(const Word& w);
Word reduce(Word w);
Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);

struct Presentation {
    std::string name;
    int rank = 0;
    std::vector<Word> relators;
    Word meridian;
    Word longitude;
    std::optional<int> genus;
    bool assume_small = false;
    std::string comment;
};

Presentation presentation_from_json(const nlohmann::json& j);
Presentation parse_manifold(const std::filesystem::path& path);

struct HomologyData {
    int free_rank = 0;
    std::int64_t torsion_order = 1;
    IntVector torsion_invariants;  // invariant factors > 1
    IntVector free_images;         // per generator, oriented so the meridian is positive
    std::int64_t k = 1;            // order of the longitude in H1
    std::int64_t mu_index = 1;     // index of <meridian> in the free quotient
};

// Relator-by-generator exponent sums.
IntMatrix exponent_matrix(const Presentation& p);
IntVector exponent_sums(const Word& w, int rank);

HomologyData abelianization_data(const Presentation& p);
std::int64_t free_image(const HomologyData& h, const Word& w);

}  // namespace tl

#pragma once

#include <utility>
#include <vector>

#include "tl/covergroup.hpp"
#include "tl/repvar.hpp"

namespace tl {

// twisted: real character whose image lies in PGL(2,R) but not PSL(2,R)
enum class RealForm { split, compact, circle, twisted };
const char* to_string(RealForm f);

using PeripheralType = IsometryType;

struct RealRep {
    std::vector<Mat2> matrices;  // empty unless split or circle
    RealForm form = RealForm::split;
    int branch_id = -1;
    int angle_index = -1;
};

struct RealityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Largest value of |Im tr^2(w)| / (1 + |tr^2(w)|) over generators, their
// pairwise products and the peripheral words.
double reality_defect(const RepSystem& sys, const RepPoint& r);
bool is_real_character(const RepSystem& sys, const RepPoint& r, double tol = 1e-8);

RealRep real_form(const RepSystem& sys, const RepPoint& r);
RealRep real_form(const std::vector<CMat2>& gens);

PeripheralType classify_matrix(const Mat2& m, double tol = 1e-8);
std::pair<PeripheralType, PeripheralType> classify_peripheral(const RealRep& r, const Presentation& p,
                                                              double tol = 1e-8);

Mat2 real_word(const std::vector<Mat2>& gens, const Word& w);

}  // namespace tl

#include "tl/bigfloat.hpp"

#include <stdexcept>

namespace tl {

std::string BigFloat::to_hex() const
{
    char* buf = nullptr;
    if (mpfr_asprintf(&buf, "%Ra", v_) < 0) throw std::runtime_error("mpfr_asprintf failed");
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

BigFloat BigFloat::from_hex(const std::string& s, mpfr_prec_t bits)
{
    BigFloat r(bits);
    if (mpfr_set_str(r.v_, s.c_str(), 0, MPFR_RNDN) != 0)
        throw std::invalid_argument("not a big-float literal: " + s);
    return r;
}

BigFloat BigFloat::pi(mpfr_prec_t bits)
{
    BigFloat r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}

}  // namespace tl

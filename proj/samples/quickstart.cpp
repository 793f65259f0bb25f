// Builds a one-parameter block shift, checks its trace pairing and the
// irreducibility criterion, then prints the verdicts.

#include <iostream>

#include "blockshift_lab/blockshift_lab.hpp"

namespace bl = blockshift_lab;

int main() {
    // t_n = sqrt(|n + 0.3| / |n + 0.7|), diagonal d = 1
    const bl::SequenceSpec t = bl::seq::sqrt_abs_quotient(bl::seq::affine(0.3), bl::seq::affine(0.7));
    const bl::BlockShiftSpec s = bl::BlockShiftSpec::td(t, bl::seq::constant(1.0));
    const bl::Window win(-20, 20);

    const bl::ReflectionSearch refl = bl::find_reflection(s, win);
    if (!refl.i0) {
        std::cout << "no reflection pairing found\n";
        return 1;
    }
    std::cout << "trace pairing n -> -(n+" << *refl.i0 << "), exclusive "
              << (refl.report.exclusive.value_or(false) ? "yes" : "no") << "\n";

    const bl::Verdict v = bl::check_alpha_criterion(t, 1.0, *refl.i0, win, {});
    std::cout << "irreducibility: " << bl::to_string(v.status);
    if (!v.holds()) std::cout << " (" << v.clause << ")";
    std::cout << "\n";
    for (const auto& note : v.notes) std::cout << "  " << note << "\n";
    return v.holds() ? 0 : 1;
}

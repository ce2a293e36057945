#pragma once

#include "schanuel/engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace schanuel {

/// Facts a proof script establishes, in the order they are claimed.
struct ProofOutcome {
  std::string script;
  std::vector<FactId> results;
};

/// E and L meet only in the algebraic numbers: sqrt2 is the sample member.
ProofOutcome prove_cor1(KnowledgeBase& kb);
/// e is not in L and pi is not in E.
ProofOutcome prove_cor2(KnowledgeBase& kb);
/// {i pi, log pi, ..., log_[depth] pi} is algebraically independent over Q
/// and over E. The set has depth + 1 elements.
ProofOutcome prove_cor3(KnowledgeBase& kb, unsigned depth);
/// {e, e^e, ..., exp^[depth](1)} is algebraically independent over Q and
/// over L.
ProofOutcome prove_cor4(KnowledgeBase& kb, unsigned depth);

/// A hypothetical relation sum l_i e_i = 0 with l_i in L_n, e_i in E_m.
struct Witness {
  std::vector<Term> l;
  std::vector<Term> e;
};
/// l = (1, log_[n-1] pi), e = (exp^[m](1), 1); for n = 1 the log is pi.
Witness default_witness(unsigned m, unsigned n);

/// Linear disjointness of E_m and L_n over Qbar by refuting the witness;
/// levels below are replayed first. Throws ObligationError when a step
/// cannot be certified (for instance a witness whose l_i are dependent).
ProofOutcome replay_theorem(KnowledgeBase& kb, unsigned m, unsigned n,
                            const std::optional<Witness>& witness = std::nullopt);

/// Independence facts used as lemmas by the queries: the cor4 chain up to
/// `exp_depth` and the cor3 chain up to `log_depth`.
void seed_knowledge(KnowledgeBase& kb, unsigned exp_depth, unsigned log_depth);

}  // namespace schanuel

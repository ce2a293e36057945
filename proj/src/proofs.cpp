#include "schanuel/proofs.hpp"

#include <stdexcept>

namespace schanuel {

using nlohmann::json;

namespace {

std::vector<Term> unite(std::vector<Term> a, const std::vector<Term>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return term_set(std::move(a));
}

FactId nonzero(KnowledgeBase& kb, Term t, const std::string& anchor) {
  auto c = certify_nonzero(t);
  if (!c) throw ObligationError("certify-nonzero", "cannot separate " + print(t) + " from 0");
  return kb.derive("certify-nonzero", {}, stmt::qli({c->term}),
                   json{{"precision", c->precision}, {"lower_bound", c->lower_bound}}, anchor);
}

FactId algebraic(KnowledgeBase& kb, const std::vector<Term>& x, const std::vector<Term>& over,
                 const std::string& anchor) {
  auto f = derive_algebraic_over(kb, x, over, anchor);
  if (!f) throw ObligationError("algebraic-closure", "cannot show the set algebraic over the base");
  return *f;
}

// Like `algebraic`, but cites every fact in `via` that applies, so the
// trace shows which supports and bases carry the step.
FactId algebraic_via(KnowledgeBase& kb, const std::vector<Term>& x, const std::vector<Term>& over,
                     const std::vector<FactId>& via, const std::string& anchor) {
  std::vector<Dependency> deps;
  for (FactId id : via) {
    const Statement s = kb.fact(id).statement;
    deps.push_back(s.kind == Stmt::TranscendenceBasis ? Dependency{s.over, s.set} : Dependency{s.set, s.over});
  }
  const Statement target = stmt::algebraic_over(x, over);
  Closure cl(target.over);
  const auto fired = cl.saturate(deps);
  if (!cl.contains_all(target.set)) return algebraic(kb, x, over, anchor);
  std::vector<FactId> premises;
  for (std::size_t i = 0; i < via.size(); ++i)
    if (fired[i]) premises.push_back(via[i]);
  return kb.derive("algebraic-closure", premises, target, {}, anchor);
}

// Moves a lower bound to `target` over which the bounded set is algebraic,
// then reads it as independence.
FactId lift(KnowledgeBase& kb, FactId bound, const std::vector<Term>& target, const std::string& anchor) {
  const Statement b = kb.fact(bound).statement;
  FactId alg = algebraic(kb, b.set, target, anchor);
  FactId t = kb.derive("trdeg-transfer", {bound, alg}, stmt::trdeg_at_least(target, b.n), {}, anchor);
  return kb.derive("ai-from-trdeg", {t}, stmt::ai(target), {}, anchor);
}

std::vector<Term> exp_tower(unsigned from, unsigned to) {
  std::vector<Term> out;
  for (unsigned k = from; k <= to; ++k) out.push_back(iterated_exp(k));
  return out;
}

// AI({e, ..., exp^[k+1](1)}) for k < depth.
std::vector<FactId> exp_chain(KnowledgeBase& kb, unsigned depth) {
  std::vector<FactId> out;
  for (unsigned n = 0; n < depth; ++n) {
    const std::vector<Term> a = exp_tower(0, n);
    FactId li = n == 0 ? nonzero(kb, one(), "cor4/base")
                       : kb.derive("li-from-ai", {out.back()}, stmt::qli(a), {}, "cor4/one-joins");
    FactId tr = schanuel_apply(kb, a, li, "cor4/conjecture");
    out.push_back(lift(kb, tr, exp_tower(1, n + 1), "cor4/images"));
  }
  return out;
}

std::vector<Term> log_tower(unsigned depth) {  // i pi, log pi, ..., log_[depth] pi
  std::vector<Term> out{i_pi()};
  for (unsigned k = 1; k <= depth; ++k) out.push_back(iterated_log_pi(k));
  return out;
}

std::vector<Term> pi_tower(unsigned depth) {  // pi, log pi, ..., log_[depth] pi
  std::vector<Term> out;
  for (unsigned k = 0; k <= depth; ++k) out.push_back(iterated_log_pi(k));
  return out;
}

struct LogChain {
  std::vector<FactId> logs;  ///< AI(log_tower(k))
  std::vector<FactId> pis;   ///< AI(pi_tower(k))
};

LogChain log_chain(KnowledgeBase& kb, unsigned depth) {
  LogChain c;
  const FactId ipi = nonzero(kb, i_pi(), "cor3/base");
  auto pis_from = [&](unsigned k) {
    const auto t = log_tower(k);
    FactId b = kb.derive("trdeg-from-ai", {c.logs[k]}, stmt::trdeg_at_least(t, static_cast<long>(t.size())), {},
                         "cor3/pi-for-i-pi");
    c.pis.push_back(lift(kb, b, pi_tower(k), "cor3/pi-for-i-pi"));
  };
  c.logs.push_back(lift(kb, schanuel_apply(kb, {i_pi()}, ipi, "cor3/conjecture"), log_tower(0), "cor3/base"));
  pis_from(0);
  for (unsigned n = 1; n <= depth; ++n) {
    const auto t = log_tower(n);
    FactId lim = record_linear_to_monomial(kb, t, "cor3/monomial-image");
    FactId mt = monomial_triviality(kb, lim, c.pis[n - 1], "cor3/monomial-image");
    FactId li = kb.derive("li-from-monomial", {lim, mt, ipi}, stmt::qli(t), {}, "cor3/monomial-image");
    c.logs.push_back(lift(kb, schanuel_apply(kb, t, li, "cor3/conjecture"), t, "cor3/step"));
    pis_from(n);
  }
  return c;
}

FactId lemma(KnowledgeBase& kb) {
  return kb.derive("theorem-lemma", {}, stmt::linearly_disjoint(kAnyLevel, kAnyLevel), {}, "theorem/all-levels");
}

// AI over the other tower from AI over Q plus disjointness.
FactId free_over_tower(KnowledgeBase& kb, FactId ai, Field base, const std::string& anchor) {
  const Statement s = kb.fact(ai).statement;
  FactId q = kb.derive("ai-base-change", {ai}, stmt::ai(s.set, Field::Qbar), {}, anchor);
  std::vector<FactId> premises{lemma(kb), q};
  const bool over_l = base == Field::L;
  for (Term t : s.set)
    premises.push_back(kb.derive(over_l ? "member-e-syntactic" : "member-l-syntactic", {},
                                 stmt::member(over_l ? Stmt::MemberE : Stmt::MemberL, t), {}, anchor));
  return kb.derive("freeness-transfer", premises, stmt::ai(s.set, base, kAnyLevel), {}, anchor);
}

FactId member_at(KnowledgeBase& kb, Stmt kind, Term x, long level, const std::string& anchor) {
  return kb.derive(kind == Stmt::MemberE ? "member-e-syntactic" : "member-l-syntactic", {}, stmt::member(kind, x, level),
                   {}, anchor);
}

}  // namespace

void seed_knowledge(KnowledgeBase& kb, unsigned exp_depth, unsigned log_depth) {
  exp_chain(kb, exp_depth);
  log_chain(kb, log_depth);
}

ProofOutcome prove_cor4(KnowledgeBase& kb, unsigned depth) {
  if (depth == 0) throw std::invalid_argument("depth must be at least 1");
  const FactId ai = exp_chain(kb, depth).back();
  return {"cor4 depth=" + std::to_string(depth), {ai, free_over_tower(kb, ai, Field::L, "cor4/over-L")}};
}

ProofOutcome prove_cor3(KnowledgeBase& kb, unsigned depth) {
  const FactId ai = log_chain(kb, depth).logs.back();
  return {"cor3 depth=" + std::to_string(depth), {ai, free_over_tower(kb, ai, Field::E, "cor3/over-E")}};
}

ProofOutcome prove_cor2(KnowledgeBase& kb) {
  const Term e = iterated_exp(1);
  const FactId ai_e = exp_chain(kb, 1).back();
  const FactId ai_ipi = log_chain(kb, 0).logs.back();
  const FactId meet = kb.derive("disjoint-intersection", {lemma(kb)},
                                stmt::intersection_is_qbar(kAnyLevel, kAnyLevel), {}, "cor2/intersection");

  FactId tq = kb.derive("not-member-qbar", {ai_e}, stmt::member(Stmt::NotMemberQbar, e), {}, "cor2/e");
  FactId me = kb.derive("member-e-syntactic", {}, stmt::member(Stmt::MemberE, e, 1), {}, "cor2/e");
  FactId not_l = kb.derive("not-member-l", {meet, me, tq}, stmt::member(Stmt::NotMemberL, e), {}, "cor2/e");

  FactId tp = kb.derive("not-member-qbar", {ai_ipi}, stmt::member(Stmt::NotMemberQbar, i_pi()), {}, "cor2/pi");
  FactId ml = kb.derive("member-l-syntactic", {}, stmt::member(Stmt::MemberL, i_pi(), 1), {}, "cor2/pi");
  FactId not_e = kb.derive("not-member-e", {meet, ml, tp}, stmt::member(Stmt::NotMemberE, i_pi()), {}, "cor2/pi");
  FactId alg = algebraic(kb, {i_pi()}, {pi()}, "cor2/pi");
  FactId not_e_pi =
      kb.derive("not-member-transfer", {not_e, alg}, stmt::member(Stmt::NotMemberE, pi()), {}, "cor2/pi");
  return {"cor2", {not_l, not_e_pi}};
}

ProofOutcome prove_cor1(KnowledgeBase& kb) {
  const Term r = parse("sqrt2");
  const FactId meet = kb.derive("disjoint-intersection", {lemma(kb)},
                                stmt::intersection_is_qbar(kAnyLevel, kAnyLevel), {}, "cor1/intersection");
  FactId me = kb.derive("member-e-syntactic", {}, stmt::member(Stmt::MemberE, r, 0), {}, "cor1/sample");
  FactId ml = kb.derive("member-l-syntactic", {}, stmt::member(Stmt::MemberL, r, 0), {}, "cor1/sample");
  FactId q = kb.derive("disjoint-membership", {meet, me, ml}, stmt::member(Stmt::MemberQbar, r), {}, "cor1/sample");
  return {"cor1", {meet, q}};
}

Witness default_witness(unsigned m, unsigned n) {
  if (m == 0 || n == 0) throw std::invalid_argument("witness levels start at 1");
  return {{one(), iterated_log_pi(n - 1)}, {iterated_exp(m), one()}};
}

ProofOutcome replay_theorem(KnowledgeBase& kb, unsigned m, unsigned n, const std::optional<Witness>& witness) {
  const std::string script = "theorem m=" + std::to_string(m) + " n=" + std::to_string(n);
  const long lm = static_cast<long>(m), ln = static_cast<long>(n);
  if (m == 0 || n == 0)
    return {script, {kb.derive("disjoint-base", {}, stmt::linearly_disjoint(lm, ln), {}, "theorem/base")}};

  const FactId below = m == 1 ? kb.derive("disjoint-base", {}, stmt::linearly_disjoint(0, ln), {}, "theorem/base")
                              : replay_theorem(kb, m - 1, n).results.back();
  const Witness w = witness ? *witness : default_witness(m, n);
  if (w.l.empty() || w.l.size() != w.e.size())
    throw ObligationError("assume", "witness lists must have equal positive length");
  std::vector<Term> wl, we;
  for (Term t : w.l) wl.push_back(normalize(t));
  for (Term t : w.e) we.push_back(normalize(t));
  const auto ls = term_set(wl), es = term_set(we);

  // Supports of the witness elements, derived before the chains so the
  // trace credits them rather than an equal statement from a chain.
  std::vector<Term> a, c;
  std::vector<FactId> via;  // supports and bases, cited by the algebraic steps
  for (Term x : es) {
    if (x->is_constant()) continue;
    SupportSet s;
    try {
      s = exp_support(x);
    } catch (const std::exception& ex) {
      throw ObligationError("key-lemma-exp", ex.what());
    }
    FactId f = kb.derive("key-lemma-exp", {}, stmt::support(SupportKind::Exp, x, s.elements, s.level_witness),
                         json{{"support", to_json(s)}}, "theorem/exp-support");
    via.push_back(kb.derive("support-algebraic-over", {f},
                            stmt::algebraic_over(unite(s.elements, {x}), exp_images(s.elements)), {},
                            "theorem/exp-support"));
    a = unite(a, s.elements);
  }
  for (Term x : ls) {
    if (x->is_constant()) continue;
    SupportSet s;
    try {
      s = log_support(x);
    } catch (const std::exception& ex) {
      throw ObligationError("key-lemma-log", ex.what());
    }
    FactId f = kb.derive("key-lemma-log", {}, stmt::support(SupportKind::Log, x, s.elements, s.level_witness),
                         json{{"support", to_json(s)}}, "theorem/log-support");
    via.push_back(kb.derive("support-algebraic-over", {f},
                            stmt::algebraic_over(unite(exp_images(s.elements), {x}), s.elements), {},
                            "theorem/log-support"));
    c = unite(c, s.elements);
  }

  exp_chain(kb, m);
  log_chain(kb, n - 1);

  // The l_i are linearly independent over Qbar.
  std::vector<Term> l_vary;
  for (Term t : ls)
    if (!t->is_constant()) l_vary.push_back(t);
  FactId l_free;
  if (l_vary.empty()) {
    if (ls.size() != 1) throw ObligationError("li-from-ai", "distinct algebraic l_i are dependent over Qbar");
    l_free = kb.derive("qbar-li-single", {nonzero(kb, ls[0], "theorem/l-free")}, stmt::qbar_li(ls), {},
                       "theorem/l-free");
  } else {
    auto ai = find_independence(kb, l_vary, Field::Q, "theorem/l-free");
    if (!ai) throw ObligationError("li-from-ai", "no independence certificate for the l_i");
    l_free = kb.derive("li-from-ai", {*ai}, stmt::qbar_li(ls), {}, "theorem/l-free");
  }

  const FactId hyp = kb.derive("assume", {}, stmt::witness(wl, we, lm, ln), {}, "theorem/hypothesis");

  const BasisResult bb = select_transcendence_basis(kb, a, BasisTarget::ExpImage);
  const BasisResult db = select_transcendence_basis(kb, c, BasisTarget::Identity);
  via.push_back(bb.fact);
  via.push_back(db.fact);
  const std::vector<Term> b = term_set(bb.basis);
  const std::vector<Term> d = term_set(db.basis);
  if (b.empty() && d.empty()) throw ObligationError("li-split-disjoint", "both bases are empty");
  const std::vector<Term> bd = unite(b, d);

  // B u D is linearly independent over Q.
  FactId bd_free;
  std::optional<FactId> b_free;
  if (!b.empty()) {
    LIResult r = check_q_linear_independence(kb, b);
    if (r.outcome != LIOutcome::Certificate) throw ObligationError("li-split-disjoint", "B is not certified free");
    b_free = r.certificate;
  }
  if (d.empty()) {
    bd_free = *b_free;
  } else {
    auto d_alg = find_independence(kb, d, b.empty() ? Field::Q : Field::Qbar, "theorem/split");
    if (!d_alg) throw ObligationError("li-split-disjoint", "D lost its independence certificate");
    if (b.empty()) {
      bd_free = kb.derive("li-from-ai", {*d_alg}, stmt::qli(d), {}, "theorem/split");
    } else {
      std::vector<FactId> premises{
          kb.derive("disjoint-intersection", {below}, stmt::intersection_is_qbar(lm - 1, ln), {}, "theorem/split"),
          *b_free, *d_alg};
      for (Term t : b) premises.push_back(member_at(kb, Stmt::MemberE, t, lm - 1, "theorem/split"));
      for (Term t : d) premises.push_back(member_at(kb, Stmt::MemberL, t, ln, "theorem/split"));
      bd_free = kb.derive("li-split-disjoint", premises, stmt::qli(bd), {}, "theorem/split");
    }
  }

  // Transcendence degree of D u exp(B) is |B| + |D|.
  const FactId lower1 = schanuel_apply(kb, bd, bd_free, "theorem/conjecture");
  const auto exp_b = exp_images(b), exp_d = exp_images(d), exp_a = exp_images(a);
  const std::vector<Term> s1 = kb.fact(lower1).statement.set;
  const std::vector<Term> s2 = unite(unite(unite(b, c), exp_a), exp_d);
  const std::vector<Term> s3 = unite(c, exp_a);
  const std::vector<Term> s4 = unite(d, exp_b);
  const long k = static_cast<long>(bd.size());
  FactId lower = lower1;
  std::vector<Term> from = s1;
  for (const auto& to : {s2, s3, s4}) {
    FactId eq = kb.derive("trdeg-equal-sets", {algebraic_via(kb, from, to, via, "theorem/degree"), algebraic_via(kb, to, from, via, "theorem/degree")},
                          stmt::trdeg_equal_sets(from, to), {}, "theorem/degree");
    lower = kb.derive("trdeg-transfer-equal", {eq, lower}, stmt::trdeg_at_least(to, k), {}, "theorem/degree");
    from = to;
  }
  if (static_cast<long>(s4.size()) != k) throw ObligationError("trdeg-squeeze", "D and exp(B) overlap");
  const FactId upper =
      kb.derive("trdeg-upper", {algebraic(kb, s4, s4, "theorem/squeeze")}, stmt::trdeg_at_most(s4, k), {}, "theorem/squeeze");
  const FactId exact = kb.derive("trdeg-squeeze", {lower, upper}, stmt::trdeg_equals(s4, k), {}, "theorem/squeeze");
  const FactId free4 = kb.derive("ai-from-trdeg", {exact}, stmt::ai(s4), {}, "theorem/degree");

  const FactId cf = kb.derive("closures-free", {free4}, stmt::closures(Stmt::ClosuresFree, exp_b, d), {},
                              "theorem/closures");
  const FactId disjoint = kb.derive("lang-4.12", {cf}, stmt::closures(Stmt::ClosuresLinearlyDisjoint, exp_b, d), {},
                                    kLangAnchor);
  const FactId l_alg = algebraic_via(kb, ls, d, via, "theorem/closures");
  const FactId e_alg = algebraic_via(kb, es, exp_b, via, "theorem/closures");
  Term nz = nullptr;
  for (Term t : es)
    if (!is_rational(t, 0) && (!nz || (nz->is_constant() && !t->is_constant()))) nz = t;
  if (!nz) throw ObligationError("witness-contradiction", "all e_i vanish");
  const FactId nonvanishing = nonzero(kb, nz, "theorem/nonzero-e");

  const FactId bottom = kb.derive("witness-contradiction", {hyp, l_free, l_alg, e_alg, disjoint, nonvanishing},
                                  stmt::contradiction(), {}, "theorem/contradiction");
  std::vector<FactId> premises{bottom, hyp};
  for (Term t : es) premises.push_back(member_at(kb, Stmt::MemberE, t, lm, "theorem/discharge"));
  for (Term t : ls) premises.push_back(member_at(kb, Stmt::MemberL, t, ln, "theorem/discharge"));
  return {script, {kb.derive("discharge", premises, stmt::linearly_disjoint(lm, ln), {}, "theorem/discharge")}};
}

}  // namespace schanuel

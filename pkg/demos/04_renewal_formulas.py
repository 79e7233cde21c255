"""Closed forms of the regenerative containment sequence.

With hitting mass lam and base a, the indicator of {scaled zero cell covers K}
is regenerative at its 1s: q_n = exp(-(1 - a^-n) lam). The interarrival law
follows by inclusion-exclusion or by the renewal equation, the mean recurrence
time is exp(lam), and the stationary renewal set has length-biased spanning
gaps. The same machinery gives the conditional law of the a-scaled body.
"""
import math

from crofton import (
    RegenParams,
    conditional_pattern_prob,
    marginal_thinning_ratio,
    mean_recurrence,
    p_by_inclusion_exclusion,
    p_by_renewal_recursion,
    q_vector,
    stationary_delay,
)

params = RegenParams(lambda_k=1.0, a=2.0)
q = q_vector(params, 400)
p = p_by_renewal_recursion(q, 400)

print("n    q_n            p_n (recursion)   p_n (inclusion-exclusion)")
for n in range(1, 9):
    print(f"{n}    {q.q(n):.10f}   {p.p(n):.10f}      {p_by_inclusion_exclusion(q, n):.10f}")

mr = mean_recurrence(p)
print(f"\nmean recurrence time: {mr.value:.10f}   (exp(lam) = {math.e:.10f})")
print(f"truncation tail mass: {mr.tail_mass:.2e}, mean tail bound: {mr.mean_tail_bound:.2e}")

law = stationary_delay(p)
print("\nstationary renewal set around a fixed index:")
for k in range(1, 5):
    print(f"  spanning gap = {k}: {law.spanning[k - 1]:.6f}   (length-biased k p_k / rho)")
for k in range(0, 4):
    print(f"  forward delay = {k}: {law.forward[k]:.6f}")

print("\nconditional law of the 2-scaled body on an interior run index:")
keep = conditional_pattern_prob(params, 1, 0)
print(f"  keep probability, given 1s at the index and its predecessor: {keep:.6f}")
print(f"  marginal ratio exp(-(a-1) lam) an independent thinning would use: "
      f"{marginal_thinning_ratio(params):.6f}")
print("  the two differ: the scaled sequence is not an independent thinning.")

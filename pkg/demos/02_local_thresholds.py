"""How a frequency threshold is chosen from the model.

Given an itemset l, the miner looks at every candidate item c and how
often it co-occurs with l.  The model says how many candidates would
reach each co-occurrence count r by chance alone; comparing that with
the observed histogram gives a predicted precision for the rule
"accept every candidate with count >= r".  The chosen threshold is the
smallest count whose predicted precision still meets the target pi.

The numbers below are a classic worked example: a conditional database
with 339 candidate items and rescaled model parameters k=0.844,
a_l=1.164.
"""

from nbminer import find_threshold, predicted_precision

o_hist = {1: 81, 2: 48, 3: 13, 4: 6, 6: 1, 8: 1, 11: 2, 12: 1, 13: 1, 14: 1, 18: 1}
n_candidates = 339
k, a_l = 0.844, 1.164

print("threshold r   observed>=r   predicted precision")
observed_tail = 0
for r in range(max(o_hist), 0, -1):
    observed_tail += o_hist.get(r, 0)
    precision = predicted_precision(o_hist, n_candidates, k, a_l, r)
    marker = ""
    if precision < 0.95 and r > 1:
        marker = "  <- first failure going down"
    print(f"{r:11d}   {observed_tail:11d}   {precision:19.5f}{marker}")
    if marker:
        break

for pi in (0.999, 0.99, 0.95, 0.9, 0.5):
    sigma = find_threshold(o_hist, n_candidates, k, a_l, pi)
    print(f"pi={pi:<6}: threshold sigma_freq = {sigma}")

print("\nNote the scan runs from the highest observed count downward and")
print("stops at the first failure: predicted precision is not monotone in r,")
print("so scanning upward could overshoot past a perfectly good threshold.")

# A small benchmark campaign
#
# Each campaign draws `trials` planted instances from one scenario, solves
# each from x0 = ones and reports iteration counts, times, terminal errors and
# the success rate.  Trial k always uses the stream SeedSequence([seed, k]),
# so a campaign can be rerun exactly.

from tave.bench import ScenarioSpec, emit_table, run_campaign

grid = []
for scenario in ("MM", "MG", "GM", "GG"):
    for p, q, n in [(3, 3, 5), (4, 3, 5)]:
        spec = ScenarioSpec(scenario, p, q, n, trials=20, seed=7)
        grid.append((spec, run_campaign(spec)))

print(emit_table(grid, "markdown"))

# Failures are broken down by cause; means only use the successful trials.

for spec, stats in grid:
    if stats.failures_by_cause:
        print(spec.scenario, (spec.p, spec.q, spec.n), stats.failures_by_cause)

# Same spec, same counts (wall-clock fields aside).

spec = grid[0][0]
print("reproducible:", run_campaign(spec).same_counts(grid[0][1]))

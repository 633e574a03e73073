# %% [markdown]
# # From memberships to concepts
#
# The worked example ships its membership table as a fixture. An alpha-cut
# per attribute prunes weak cells, the surviving cells form a fuzzy formal
# context, and NextClosure enumerates its concepts.

# %%
from pathlib import Path

from fodm import build, enumerate_concepts, export_dot, load_config, load_dataset, validate_config
from fodm.fcm import read_memberships_csv
from fodm.scaling import context_to_csv

DATA = Path(__file__).resolve().parents[1] / "data"
dataset = load_dataset(DATA / "table1.csv")
config = validate_config(dataset, load_config(DATA / "employees.toml"))
fixture = read_memberships_csv((DATA / "table2_memberships.csv").read_text())
result = build(dataset, config, fixture)

# %%
print(context_to_csv(result.context))

# %% [markdown]
# One lattice per attribute, then the combined one.

# %%
for attr, tah in result.tahs.items():
    print(attr, len(tah), "concepts")
print("combined", len(result.mtah), "concepts,", len(result.mtah.covers), "covers")

# %%
for concept in result.mtah.concepts:
    extent = ", ".join(f"{o}:{d:g}" for o, d in sorted(concept.extent.items()))
    print(sorted(concept.intent), "->", "{" + extent + "}")

# %%
print(export_dot(enumerate_concepts(result.context.subcontext("Age")), title="Age"))

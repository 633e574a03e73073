# %% [markdown]
# # Clustering one attribute
#
# Each numeric column is partitioned on its own with fuzzy c-means. The
# result is a membership matrix whose rows sum to 1 and whose columns are
# ordered by ascending cluster center, so that linguistic labels can be
# bound in order (Low < Medium < High).

# %%
from pathlib import Path

from fodm import cluster_attribute, load_config, load_dataset, validate_config
from fodm.fcm import memberships_to_csv

DATA = Path(__file__).resolve().parents[1] / "data"
dataset = load_dataset(DATA / "table1.csv")
config = validate_config(dataset, load_config(DATA / "employees.toml"))

# %%
for spec in config.specs:
    model = cluster_attribute(dataset.column(spec.attribute), spec, dataset.object_ids)
    print(f"{spec.attribute}: centers {model.centers.round(2)} after {model.iterations} iterations")
    print(memberships_to_csv(model.memberships))

# %% [markdown]
# The objective never increases from one iteration to the next.

# %%
salary = cluster_attribute(dataset.column("SALARY"), config.specs[0], dataset.object_ids)
print([round(j, 1) for j in salary.history])

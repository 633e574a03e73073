# %% [markdown]
# # Graded queries
#
# A query is a conjunction of `Attribute=Label` terms. Each object scores
# the minimum of its memberships in the named clusters; objects missing any
# of them drop out.

# %%
from pathlib import Path

from fodm import build, evaluate_query, load_config, load_dataset, parse_query, validate_config
from fodm.fcm import read_memberships_csv

DATA = Path(__file__).resolve().parents[1] / "data"
dataset = load_dataset(DATA / "table1.csv")
config = validate_config(dataset, load_config(DATA / "employees.toml"))
context = build(dataset, config, read_memberships_csv((DATA / "table2_memberships.csv").read_text())).context

# %%
for text in ("Age=Young,Salary=Low", "Salary=Medium", "Age=Adult,Salary=Medium", ""):
    print(repr(text))
    print(evaluate_query(context, parse_query(text)).format(4))

# %% [markdown]
# Thresholds and top-k trim the ranked answer.

# %%
print(evaluate_query(context, parse_query("Salary=Medium", threshold=0.5, top_k=2)).format(4))

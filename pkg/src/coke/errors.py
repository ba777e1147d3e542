"""Exception types shared across the engine and harness."""


class ConfigError(ValueError):
    """Invalid engine configuration or arm registry."""


class DataError(ValueError):
    """Malformed dataset, generation spec, or other input file."""


class BudgetBreachError(RuntimeError):
    """A charge would push LLM spend past the budget.

    Admissibility is checked before every selection, so reaching this
    indicates a bug in the caller, not bad user input.
    """


class NoAdmissibleArmError(RuntimeError):
    """No arm can be selected (empty registry, or all arms budget-blocked)."""

from .billing import (
    BillingLedger,
    BillingRecord,
    billing_report,
    invocation_cost,
    simulate_schedule,
)
from .config import (
    DEFAULT_RATE_USD_PER_GB_S,
    FunctionConfig,
    ServeSettings,
    load_serve_settings,
)
from .instance import FunctionInstance, InstanceState, QueryResult
from .pool import FunctionPool

__all__ = [
    "billing_report",
    "invocation_cost",
    "load_serve_settings",
    "simulate_schedule",
    "BillingLedger",
    "BillingRecord",
    "DEFAULT_RATE_USD_PER_GB_S",
    "FunctionConfig",
    "FunctionInstance",
    "FunctionPool",
    "InstanceState",
    "QueryResult",
    "ServeSettings",
]

"""The pool manager: warm reuse, cold provisioning, autoscaling, swap.

Scheduling policy for an arriving invocation:

1. an idle WARM instance on the target generation serves it;
2. otherwise, if live instances (including in-flight provisions) are
   below max_instances, a new instance is cold-started for it;
3. otherwise it waits FIFO for a release, up to queue_timeout_s, then
   fails as overload.

Generation swap is drain-and-replace: the target generation flips, idle
instances on the old generation retire immediately, busy ones retire at
release, and new provisions target the new generation. An instance only
ever serves the single generation it was provisioned with, so every
result is computed entirely within one generation.
"""

from __future__ import annotations

import itertools
import threading
import time
import uuid
from typing import Callable

from ..directory import Directory
from ..errors import GenerationError, PoolOverloadError
from .billing import BillingLedger, BillingRecord, invocation_cost
from .config import FunctionConfig
from .instance import FunctionInstance, InstanceState, QueryResult

DirectoryFactory = Callable[[str], Directory]
GenerationVerifier = Callable[[str], list[str]]  # -> missing file paths


class FunctionPool:
    """Manages the instances serving one partition.

    ``directory_factory(generation_id)`` yields the uncached byte source
    for that generation's segment. ``verifier(generation_id)`` returns
    the missing-file list used to reject incomplete swap targets; pools
    without a verifier accept any target and fail at provision time.
    """

    def __init__(
        self,
        config: FunctionConfig,
        directory_factory: DirectoryFactory,
        ledger: BillingLedger | None = None,
        verifier: GenerationVerifier | None = None,
        name: str = "pool",
    ):
        self.config = config
        self.name = name
        self._factory = directory_factory
        self._verifier = verifier
        self.ledger = ledger if ledger is not None else BillingLedger()
        self._cond = threading.Condition()
        self._instances: list[FunctionInstance] = []
        self._provisioning = 0
        self._target_generation = config.generation_id
        self._instance_seq = itertools.count(1)
        self._actions: list[dict] = []

    # ---- invocation path ----

    def invoke(self, query: str, k: int) -> tuple[QueryResult, BillingRecord]:
        deadline = time.monotonic() + self.config.queue_timeout_s
        instance: FunctionInstance | None = None
        target = None
        with self._cond:
            while True:
                target = self._target_generation
                instance = self._find_idle(target)
                if instance is not None:
                    instance.state = InstanceState.BUSY
                    break
                if self._live_count() < self.config.max_instances:
                    self._provisioning += 1  # slot reserved for this cold start
                    break
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise PoolOverloadError(
                        f"{self.name}: no instance available within "
                        f"{self.config.queue_timeout_s}s ({self.config.max_instances} busy)"
                    )
                self._cond.wait(remaining)

        cold = instance is None
        started = time.perf_counter()
        if cold:
            try:
                fresh = FunctionInstance.provision(
                    instance_id=f"{self.name}-i{next(self._instance_seq):04d}",
                    generation_id=target,
                    directory=self._factory(target),
                )
            except BaseException:
                with self._cond:
                    self._provisioning -= 1
                    self._cond.notify_all()
                raise
            with self._cond:
                self._provisioning -= 1
                fresh.state = InstanceState.BUSY
                self._instances.append(fresh)
            instance = fresh
            if not self.config.bill_cold_start:
                started = time.perf_counter()

        try:
            result = instance.execute(query, k)
        finally:
            duration = time.perf_counter() - started
            self._release(instance)
        record = BillingRecord(
            invocation_id=f"{self.name}-q{uuid.uuid4().hex[:12]}",
            ts=time.time(),
            memory_gb=self.config.memory_gb,
            duration_s=duration,
            cost_usd=invocation_cost(
                self.config.memory_gb, duration, self.config.rate_usd_per_gb_s
            ),
            cold=cold,
        )
        self.ledger.append(record)
        return result, record

    def _find_idle(self, generation_id: str) -> FunctionInstance | None:
        for inst in self._instances:
            if inst.state == InstanceState.WARM and inst.generation_id == generation_id:
                return inst
        return None

    def _live_count(self) -> int:
        return self._provisioning + sum(
            1 for i in self._instances if i.state != InstanceState.RETIRED
        )

    def _release(self, instance: FunctionInstance) -> None:
        with self._cond:
            instance.invocation_count += 1
            instance.last_used = time.monotonic()
            if instance.generation_id != self._target_generation:
                # drained: finished its in-flight work on the old generation
                instance.state = InstanceState.RETIRED
                self._instances.remove(instance)
                self._log_action("retire-stale", instance)
            else:
                instance.state = InstanceState.WARM
            self._cond.notify_all()

    # ---- lifecycle management ----

    def autoscale_tick(self, now: float | None = None) -> list[dict]:
        """Retire instances idle past idle_ttl_s, never dropping below the floor."""
        if now is None:
            now = time.monotonic()
        actions: list[dict] = []
        with self._cond:
            idle = sorted(
                (
                    i
                    for i in self._instances
                    if i.state == InstanceState.WARM
                    and now - i.last_used > self.config.idle_ttl_s
                ),
                key=lambda i: i.last_used,
            )
            for inst in idle:
                if self._live_count() - 1 < self.config.instance_floor:
                    break
                inst.state = InstanceState.RETIRED
                self._instances.remove(inst)
                action = self._log_action("retire-idle", inst)
                actions.append(action)
        return actions

    def refresh_generation(self, new_generation_id: str) -> dict:
        """Flip the target generation after validating completeness."""
        with self._cond:
            current = self._target_generation
        if new_generation_id == current:
            return {"previous": current, "target": current, "changed": False}
        if self._verifier is not None:
            missing = self._verifier(new_generation_id)
            if missing:
                raise GenerationError(
                    f"generation {new_generation_id!r} is incomplete", missing=missing
                )
        with self._cond:
            previous = self._target_generation
            self._target_generation = new_generation_id
            for inst in list(self._instances):
                if inst.state == InstanceState.WARM and inst.generation_id != new_generation_id:
                    inst.state = InstanceState.RETIRED
                    self._instances.remove(inst)
                    self._log_action("retire-swap", inst)
            self._cond.notify_all()
        return {"previous": previous, "target": new_generation_id, "changed": True}

    def _log_action(self, action: str, instance: FunctionInstance) -> dict:
        entry = {
            "action": action,
            "instance_id": instance.instance_id,
            "generation_id": instance.generation_id,
            "ts": time.time(),
        }
        self._actions.append(entry)
        return entry

    # ---- introspection ----

    @property
    def target_generation(self) -> str:
        with self._cond:
            return self._target_generation

    def current_generations(self) -> set[str]:
        with self._cond:
            return {i.generation_id for i in self._instances}

    def snapshot(self) -> dict:
        with self._cond:
            return {
                "name": self.name,
                "target_generation": self._target_generation,
                "provisioning": self._provisioning,
                "instances": [i.summary() for i in self._instances],
                "actions": list(self._actions),
            }

    def instances(self) -> list[FunctionInstance]:
        with self._cond:
            return list(self._instances)

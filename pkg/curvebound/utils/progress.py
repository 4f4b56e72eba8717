# utils/progress.py

import time
from typing import List, Optional

from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn, TimeRemainingColumn
from rich.table import Table

from ..types.common import CheckResult


class CheckTracker:
    """Live progress and summary tables for the invariant suite"""

    def __init__(self, total_checks: int, console: Optional[Console] = None):
        self.console = console or Console(stderr=True)
        self.total_checks = total_checks
        self.results: List[CheckResult] = []
        self.start_time = time.time()
        self._current: Optional[str] = None
        self._started = 0.0

        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[bold blue]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            TimeRemainingColumn(),
            console=self.console,
            transient=True,
        )
        self.task_id = self.progress.add_task("[cyan]Running checks...", total=total_checks)

    def __enter__(self) -> "CheckTracker":
        self.progress.start()
        return self

    def __exit__(self, *exc) -> None:
        self.progress.stop()

    def set_total(self, total_checks: int) -> None:
        self.total_checks = total_checks
        self.progress.update(self.task_id, total=total_checks)

    def start_check(self, name: str) -> None:
        self._current = name
        self._started = time.time()
        self.progress.update(self.task_id, description=f"[cyan]{name}", advance=0)

    def complete_check(self, result: CheckResult) -> None:
        if not result.elapsed:
            result.elapsed = time.time() - self._started
        self.results.append(result)
        self.progress.update(self.task_id, advance=1)

    @property
    def failed(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def display_summary(self) -> None:
        total_time = time.time() - self.start_time

        table = Table(title="Check Summary")
        table.add_column("Check", style="cyan")
        table.add_column("Result")
        table.add_column("Time", justify="right")
        table.add_column("Detail", style="dim")
        for r in self.results:
            status = "[green]pass" if r.passed else "[red]FAIL"
            table.add_row(r.name, status, f"{r.elapsed:.2f}s", r.error or r.detail)

        self.console.print(table)
        self.console.print(
            f"{len(self.results) - len(self.failed)}/{len(self.results)} passed in {total_time:.2f}s"
        )

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class AdapterConfig:
    """Where the adapter writes and where it looks for the stop signal.

    Construction creates the output directories so that an unwritable
    location fails before training starts, not mid-run.
    """

    stream_path: Path
    dump_dir: Path
    dump_cadence: int = 10
    stop_path: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "stream_path", Path(self.stream_path))
        object.__setattr__(self, "dump_dir", Path(self.dump_dir))
        if self.stop_path is not None:
            object.__setattr__(self, "stop_path", Path(self.stop_path))
        if int(self.dump_cadence) < 1:
            raise ValueError(f"dump cadence must be >= 1, got {self.dump_cadence}")
        object.__setattr__(self, "dump_cadence", int(self.dump_cadence))
        self.stream_path.parent.mkdir(parents=True, exist_ok=True)
        self.dump_dir.mkdir(parents=True, exist_ok=True)

    def stop_requested(self) -> bool:
        return self.stop_path is not None and self.stop_path.exists()

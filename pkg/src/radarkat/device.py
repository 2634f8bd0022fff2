"""The verifiable "chip": registers, memories, and the DFV step controller.

The device exposes two access paths: `bus()` is the frontdoor (single-word
transactions through address decode, with register side effects), while
`backdoor_deposit`/`backdoor_peek` splice memory images directly with no
side effects.  In DFV mode each algorithm step can be triggered individually
and never advances to the next step; in NORMAL mode a trigger runs the whole
frame.  A device instance is single-threaded: one operation at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import chain
from .chain import AngleResult, ChainConfig, Step, Target, Window
from .fixedpoint import encode_word
from .memimage import MemoryImage, RegionError, read_region, region_for, region_of_address, write_region


class Mode(IntEnum):
    NORMAL = 0
    DFV = 1


REG_BASE = 0x1_0000
MAX_RESULT_TARGETS = 16

# CONFIG block: one field per 32-bit word.
CONFIG_REGS = {
    REG_BASE + 0x00: "n",
    REG_BASE + 0x01: "m",
    REG_BASE + 0x02: "r",
    REG_BASE + 0x03: "mti_enabled",
    REG_BASE + 0x04: "window_sel",
    REG_BASE + 0x05: "cfar_alpha",
    REG_BASE + 0x06: "cfar_guard",
    REG_BASE + 0x07: "cfar_window",
    REG_BASE + 0x08: "max_targets",
    REG_BASE + 0x09: "consec_hits",
}

REG_MODE = REG_BASE + 0x100
REG_STEP_SELECT = REG_BASE + 0x101
REG_TRIGGER = REG_BASE + 0x102

REG_BUSY = REG_BASE + 0x200
REG_STEP_DONE = REG_BASE + 0x201
REG_ERROR = REG_BASE + 0x202

REG_TARGET_COUNT = REG_BASE + 0x300
TARGET_BLOCK_BASE = REG_BASE + 0x310
TARGET_BLOCK_STRIDE = 8
TARGET_FIELDS = ("RANGE_BIN", "DOPPLER_BIN", "MAGNITUDE", "AZ_PHASE", "EL_PHASE", "DIRECTION")

REG_MOTION_DETECT = REG_BASE + 0x400
REG_HIT_COUNT = REG_BASE + 0x401

_CONFIG_DEFAULTS = {
    "n": 64,
    "m": 17,
    "r": 3,
    "mti_enabled": 1,
    "window_sel": int(Window.HANN),
    "cfar_alpha": 0x0400,
    "cfar_guard": 1,
    "cfar_window": 4,
    "max_targets": 8,
    "consec_hits": 2,
}


@dataclass
class BusResponse:
    ok: bool
    data: int | None = None
    error: str | None = None


@dataclass
class StepReport:
    step: Step
    ok: bool
    error: str | None = None
    duration_cycles: int = 0
    targets: list[Target] = field(default_factory=list)
    angles: list[AngleResult] = field(default_factory=list)


@dataclass
class FrameReport:
    ok: bool
    error: str | None = None
    targets: list[Target] = field(default_factory=list)
    angles: list[AngleResult] = field(default_factory=list)
    step_cycles: dict[str, int] = field(default_factory=dict)
    total_cycles: int = 0
    motion_detect: bool = False
    hit_count: int = 0


_STEP_INPUT_REGION = {
    Step.MTI: "adc",
    Step.RFFT: "mti",
    Step.CFFT: "rfft",
    Step.CFAR: "cfft",
    Step.AE: "cfft",
}

_STEP_OUTPUT_REGION = {
    Step.MTI: "mti",
    Step.RFFT: "rfft",
    Step.CFFT: "cfft",
}


class Device:
    """One modeled DUT instance.  Not thread-safe; use one per test job."""

    def __init__(self) -> None:
        self.reset()

    # -- state ------------------------------------------------------------

    def reset(self) -> None:
        self._cfg = dict(_CONFIG_DEFAULTS)
        self.mem: dict[str, MemoryImage] = {
            "adc": MemoryImage(16),
            "mti": MemoryImage(16),
            "rfft": MemoryImage(24),
            "cfft": MemoryImage(24),
        }
        self.mode = Mode.NORMAL
        self.step_select = int(Step.MTI)
        self.busy = False
        self.step_done = False
        self.error = False
        self.step_state = "idle"
        self._targets: list[Target] = []
        self._angles: list[AngleResult] = []
        self._result_valid = False
        self.hit_count = 0
        self.motion_detect = False

    @property
    def config(self) -> ChainConfig:
        cfg = ChainConfig(
            n=self._cfg["n"],
            m=self._cfg["m"],
            r=self._cfg["r"],
            mti_enabled=bool(self._cfg["mti_enabled"]),
            window=Window(self._cfg["window_sel"]),
            cfar_alpha_raw=self._cfg["cfar_alpha"],
            cfar_guard=self._cfg["cfar_guard"],
            cfar_window=self._cfg["cfar_window"],
            max_targets=self._cfg["max_targets"],
            consec_hits=self._cfg["consec_hits"],
        )
        cfg.validate()
        return cfg

    # -- frontdoor --------------------------------------------------------

    def bus(self, op: str, addr: int, data: int | None = None) -> BusResponse:
        """Single-word frontdoor transaction."""
        op = op.upper()
        if op not in ("READ", "WRITE"):
            raise ValueError(f"bus op must be READ or WRITE, got {op!r}")
        region = region_of_address(addr)
        if region is not None:
            return self._bus_mem(op, addr, data, *region)
        if addr in CONFIG_REGS or addr in self._reg_readers():
            return self._bus_reg(op, addr, data)
        return BusResponse(False, error=f"unmapped address 0x{addr:08X}")

    def _bus_mem(self, op: str, addr: int, data: int | None, region: str, bits: int) -> BusResponse:
        img = self.mem[region]
        if op == "READ":
            word = img.get(addr)
            if word is None:
                return BusResponse(False, error=f"read of uninitialized 0x{addr:04X}")
            return BusResponse(True, data=word)
        if data is None or not (0 <= data <= img.word_max):
            return BusResponse(False, error=f"write data out of {bits}-bit range")
        img.cells[addr] = data
        return BusResponse(True)

    def _reg_readers(self) -> dict[int, int]:
        regs = {
            REG_MODE: int(self.mode),
            REG_STEP_SELECT: self.step_select,
            REG_TRIGGER: 0,  # self-clearing
            REG_BUSY: int(self.busy),
            REG_STEP_DONE: int(self.step_done),
            REG_ERROR: int(self.error),
            REG_TARGET_COUNT: len(self._targets),
            REG_MOTION_DETECT: int(self.motion_detect),
            REG_HIT_COUNT: self.hit_count,
        }
        for t in range(MAX_RESULT_TARGETS):
            base = TARGET_BLOCK_BASE + t * TARGET_BLOCK_STRIDE
            if t < len(self._targets):
                tgt = self._targets[t]
                ang = self._angles[t] if t < len(self._angles) else None
                regs[base + 0] = tgt.range_bin
                regs[base + 1] = tgt.doppler_bin
                regs[base + 2] = encode_word(tgt.magnitude_raw, 24)
                regs[base + 3] = encode_word(ang.az_phase_raw, 24) if ang else 0
                regs[base + 4] = encode_word(ang.el_phase_raw, 24) if ang else 0
                regs[base + 5] = int(ang.direction) if ang else 0
            else:
                for off in range(6):
                    regs[base + off] = 0
        return regs

    def _bus_reg(self, op: str, addr: int, data: int | None) -> BusResponse:
        if op == "READ":
            if addr in CONFIG_REGS:
                return BusResponse(True, data=self._cfg[CONFIG_REGS[addr]])
            return BusResponse(True, data=self._reg_readers()[addr])
        if data is None or not (0 <= data < (1 << 32)):
            return BusResponse(False, error="write data out of 32-bit range")
        if addr in CONFIG_REGS:
            if self.busy:
                return BusResponse(False, error="CONFIG write rejected while BUSY")
            self._cfg[CONFIG_REGS[addr]] = data
            return BusResponse(True)
        if addr == REG_MODE:
            if data not in (0, 1):
                return BusResponse(False, error="MODE must be 0 (NORMAL) or 1 (DFV)")
            self.mode = Mode(data)
            return BusResponse(True)
        if addr == REG_STEP_SELECT:
            if data not in [int(s) for s in Step]:
                return BusResponse(False, error=f"no such step {data}")
            self.step_select = data
            return BusResponse(True)
        if addr == REG_TRIGGER:
            if data != 1:
                return BusResponse(True)  # writing 0 is a no-op
            if self.mode == Mode.DFV:
                report = self.trigger_step(Step(self.step_select))
            else:
                report = self.run_frame()
            return BusResponse(True) if report.ok else BusResponse(True, error=report.error)
        return BusResponse(False, error=f"write to read-only register 0x{addr:08X}")

    # -- backdoor ---------------------------------------------------------

    def backdoor_deposit(self, region: str, image: MemoryImage) -> None:
        """Splice an image straight into a memory region: no bus activity,
        no register side effects."""
        lo, hi, bits = _region_bounds(region)
        if image.word_bits != bits:
            raise ValueError(f"{region} region holds {bits}-bit words")
        for addr, word in image.cells.items():
            if not lo <= addr < hi:
                raise ValueError(f"address 0x{addr:04X} outside {region} region")
        self.mem[region].cells.update(image.cells)

    def backdoor_peek(self, region: str) -> MemoryImage:
        """Extract a region's current image; uninitialized cells stay absent."""
        return self.mem[region].copy()

    # -- execution --------------------------------------------------------

    def _exec_step(self, step: Step, cfg: ChainConfig) -> StepReport:
        """Run one algorithm step against the mapped memory regions.

        Mode checks live in the callers; this path is shared by DFV
        triggering and full-frame operation so their results are identical.
        """
        in_region = _STEP_INPUT_REGION[step]
        layout = region_for(in_region, cfg)
        try:
            data = read_region(self.mem[in_region], layout)
        except RegionError as exc:
            return StepReport(step, False, error=str(exc))

        if step == Step.MTI:
            out = chain.mti(data, cfg)
            write_region(self.mem["mti"], region_for("mti", cfg), out)
        elif step == Step.RFFT:
            flat = data.reshape(-1, cfg.n)
            bins = chain.rfft_batch(flat, cfg)
            out = bins.reshape(cfg.r, cfg.doppler_bins, cfg.range_bins, 2)
            write_region(self.mem["rfft"], region_for("rfft", cfg), out)
        elif step == Step.CFFT:
            series = np.swapaxes(data, 1, 2)  # (R, N/2, M-1, 2)
            flat = series.reshape(-1, cfg.doppler_bins, 2)
            flat = np.ascontiguousarray(flat)
            bins = chain.cfft_batch(flat, cfg)
            out = bins.reshape(cfg.r, cfg.range_bins, cfg.doppler_bins, 2)
            write_region(self.mem["cfft"], region_for("cfft", cfg), out)
        elif step == Step.CFAR:
            self._targets = chain.cfar(data, cfg)
            self._angles = []
            self._result_valid = True
        elif step == Step.AE:
            if cfg.r < 3:
                return StepReport(step, False, error="AE unsupported with fewer than 3 channels")
            if not self._result_valid:
                return StepReport(step, False, error="AE requires a prior CFAR result")
            self._angles = chain.angle_estimate(self._targets, data, cfg)
        duration = chain.step_duration(step, cfg, target_count=len(self._targets))
        return StepReport(
            step,
            True,
            duration_cycles=duration,
            targets=list(self._targets) if step in (Step.CFAR, Step.AE) else [],
            angles=list(self._angles) if step == Step.AE else [],
        )

    def trigger_step(self, step: Step) -> StepReport:
        """DFV lock-step trigger: runs exactly one step, never the next."""
        if self.mode != Mode.DFV:
            return StepReport(step, False, error="trigger_step requires DFV mode")
        if self.busy:
            return StepReport(step, False, error="trigger rejected while BUSY")
        try:
            cfg = self.config
        except ValueError as exc:
            self.error = True
            return StepReport(step, False, error=f"invalid configuration: {exc}")
        self.busy = True
        self.step_done = False
        self.error = False
        self.step_state = "armed"
        try:
            report = self._exec_step(step, cfg)
        finally:
            self.busy = False
        if report.ok:
            self.step_done = True
            self.step_state = "done"
        else:
            self.error = True
            self.step_state = "idle"
        return report

    def run_frame(self, adc: np.ndarray | None = None) -> FrameReport:
        """NORMAL-mode full chain; updates the consecutive-hit counter and
        the motion-detect interrupt state."""
        if self.mode != Mode.NORMAL:
            return FrameReport(False, error="run_frame requires NORMAL mode")
        if self.busy:
            return FrameReport(False, error="trigger rejected while BUSY")
        try:
            cfg = self.config
        except ValueError as exc:
            self.error = True
            return FrameReport(False, error=f"invalid configuration: {exc}")
        if adc is not None:
            write_region(self.mem["adc"], region_for("adc", cfg), np.asarray(adc, dtype=np.int64))
        self.busy = True
        self.error = False
        self.step_done = False
        self._result_valid = False
        cycles: dict[str, int] = {}
        try:
            steps = [Step.MTI, Step.RFFT, Step.CFFT, Step.CFAR]
            if cfg.r == 3:
                steps.append(Step.AE)
            for step in steps:
                report = self._exec_step(step, cfg)
                if not report.ok:
                    self.error = True
                    return FrameReport(False, error=report.error)
                cycles[step.name.lower()] = report.duration_cycles
        finally:
            self.busy = False
        self.step_done = True
        self.step_state = "done"
        if self._targets:
            self.hit_count += 1
        else:
            self.hit_count = 0
        self.motion_detect = self.hit_count >= cfg.consec_hits
        return FrameReport(
            True,
            targets=list(self._targets),
            angles=list(self._angles),
            step_cycles=cycles,
            total_cycles=sum(cycles.values()),
            motion_detect=self.motion_detect,
            hit_count=self.hit_count,
        )


def _region_bounds(region: str) -> tuple[int, int, int]:
    from .memimage import REGION_BOUNDS

    if region not in REGION_BOUNDS:
        raise ValueError(f"unknown region {region!r}")
    return REGION_BOUNDS[region]


def register_map_text() -> str:
    """The published register/memory address map (address, name, format)."""
    rows: list[tuple[int, str, str, str]] = []
    fmt_by_field = {
        "n": "u32",
        "m": "u32",
        "r": "u32",
        "mti_enabled": "bool",
        "window_sel": "0=NONE 1=HANN",
        "cfar_alpha": "Q8.8",
        "cfar_guard": "u32",
        "cfar_window": "u32",
        "max_targets": "u32",
        "consec_hits": "u32",
    }
    for addr, name in sorted(CONFIG_REGS.items()):
        rows.append((addr, f"CONFIG.{name.upper()}", "rw", fmt_by_field[name]))
    rows += [
        (REG_MODE, "CTRL.MODE", "rw", "0=NORMAL 1=DFV"),
        (REG_STEP_SELECT, "CTRL.STEP_SELECT", "rw", "0=MTI 1=RFFT 2=CFFT 3=CFAR 4=AE"),
        (REG_TRIGGER, "CTRL.TRIGGER", "rw", "write 1 to trigger (self-clearing)"),
        (REG_BUSY, "STATUS.BUSY", "ro", "bool"),
        (REG_STEP_DONE, "STATUS.STEP_DONE", "ro", "bool"),
        (REG_ERROR, "STATUS.ERROR", "ro", "bool"),
        (REG_TARGET_COUNT, "RESULT.TARGET_COUNT", "ro", "u32"),
    ]
    field_fmt = {
        "RANGE_BIN": "u32",
        "DOPPLER_BIN": "u32",
        "MAGNITUDE": "Q0.23",
        "AZ_PHASE": "Q2.21 rad",
        "EL_PHASE": "Q2.21 rad",
        "DIRECTION": "0=APPROACHING 1=RECEDING 2=STATIC",
    }
    for t in range(MAX_RESULT_TARGETS):
        base = TARGET_BLOCK_BASE + t * TARGET_BLOCK_STRIDE
        for off, fname in enumerate(TARGET_FIELDS):
            rows.append((base + off, f"RESULT.TARGET{t}.{fname}", "ro", field_fmt[fname]))
    rows += [
        (REG_MOTION_DETECT, "IRQ.MOTION_DETECT", "ro", "bool"),
        (REG_HIT_COUNT, "IRQ.HIT_COUNT", "ro", "u32"),
    ]
    lines = ["# address     name                          access  format"]
    for addr, name, access, fmt in rows:
        lines.append(f"0x{addr:08X}  {name:<28}  {access:<6}  {fmt}")
    lines.append("#")
    lines.append("# memory regions (word addresses)")
    from .memimage import REGION_BOUNDS

    for name, (lo, hi, bits) in REGION_BOUNDS.items():
        lines.append(f"0x{lo:08X}  MEM.{name.upper():<24}  rw      {bits}-bit words, top 0x{hi:04X}")
    return "\n".join(lines) + "\n"

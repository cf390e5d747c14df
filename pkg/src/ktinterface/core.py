"""Block containers, edge topology and ghost padding.

Fields are stored cell-centred with the conserved components on the last
axis: a 1D block holds ``values[i, k]`` and a 2D block ``values[i, j, k]``
with ``i`` along x and ``j`` along y.  Interface points are duplicated in
both blocks that share them; only the merge step reconciles the copies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

PAD = 2

PERIODIC = "periodic"
REFLECTIVE = "reflective"
INTERFACE = "interface"

LOW, HIGH = 0, 1
_SIDE_NAMES = {(0, LOW): "W", (0, HIGH): "E", (1, LOW): "S", (1, HIGH): "N"}


class ContractViolation(RuntimeError):
    """A caller broke a precondition of the block/interface machinery."""


class InadmissibleStateError(ValueError):
    """A state left the admissible set (non-finite, rho <= 0 or p < 0)."""

    def __init__(self, message, location=None, time=None, stage=None):
        super().__init__(message)
        self.location = location
        self.time = time
        self.stage = stage

    def __str__(self):
        parts = [super().__str__()]
        if self.location is not None:
            parts.append(f"at {self.location}")
        if self.time is not None:
            parts.append(f"t={self.time:.6g}")
        if self.stage is not None:
            parts.append(f"stage={self.stage}")
        return " ".join(parts)


@dataclass(frozen=True)
class EdgeRole:
    """Boundary role of one block edge.

    ``partner`` is the block whose opposite edge closes a periodic wrap
    (``None`` means the block wraps onto itself).
    """

    kind: str
    link_id: Optional[int] = None
    partner: Optional[int] = None

    @classmethod
    def periodic(cls, partner=None):
        return cls(PERIODIC, partner=partner)

    @classmethod
    def reflective(cls):
        return cls(REFLECTIVE)

    @classmethod
    def interface(cls, link_id):
        return cls(INTERFACE, link_id=link_id)

    @property
    def is_interface(self):
        return self.kind == INTERFACE


@dataclass
class Block1D:
    x0: float
    dx: float
    values: np.ndarray
    left: EdgeRole = field(default_factory=EdgeRole.periodic)
    right: EdgeRole = field(default_factory=EdgeRole.periodic)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.dx <= 0:
            raise ValueError(f"dx must be positive, got {self.dx}")
        if self.values.shape[0] < 3:
            raise ValueError("a block needs at least 3 cells")

    ndim = 1

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def shape(self):
        return (self.n,)

    @property
    def spacing(self):
        return (self.dx,)

    @property
    def x(self):
        return self.x0 + self.dx * np.arange(self.n)

    def edge(self, axis, side):
        if axis != 0:
            raise IndexError("1D block has only axis 0")
        return self.left if side == LOW else self.right

    def set_edge(self, axis, side, role):
        if side == LOW:
            self.left = role
        else:
            self.right = role


@dataclass
class Block2D:
    origin: tuple
    dx: float
    dy: float
    values: np.ndarray
    edges: dict = field(default_factory=dict)

    ndim = 2

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 2:
            self.values = self.values[..., None]
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("dx and dy must be positive")
        if min(self.values.shape[:2]) < 3:
            raise ValueError("a block needs at least 3 cells per direction")
        for name in "WESN":
            self.edges.setdefault(name, EdgeRole.periodic())

    @property
    def nx(self):
        return self.values.shape[0]

    @property
    def ny(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape[:2]

    @property
    def spacing(self):
        return (self.dx, self.dy)

    @property
    def x(self):
        return self.origin[0] + self.dx * np.arange(self.nx)

    @property
    def y(self):
        return self.origin[1] + self.dy * np.arange(self.ny)

    def index(self, i, j):
        """Flat row-major offset of cell (i, j)."""
        return i * self.ny + j

    def edge(self, axis, side):
        return self.edges[_SIDE_NAMES[(axis, side)]]

    def set_edge(self, axis, side, role):
        self.edges[_SIDE_NAMES[(axis, side)]] = role


Block = Union[Block1D, Block2D]


@dataclass
class InterfaceLink:
    """Two block edges sharing a line (or point) of interface cells.

    ``left_block`` owns the interface cells as its last slice along ``axis``
    and ``right_block`` as its first.  ``left_index``/``right_index`` pair
    points along the interface line (2D only); ``merge_mask`` excludes
    points handled by a corner merge.
    """

    link_id: int
    left_block: int
    right_block: int
    axis: int
    dx_left: float
    dx_right: float
    left_index: Optional[np.ndarray] = None
    right_index: Optional[np.ndarray] = None
    merge_mask: Optional[np.ndarray] = None

    def left_slice(self, values):
        side = np.take(values, -1, axis=self.axis)
        return side if self.left_index is None else side[self.left_index]

    def right_slice(self, values):
        side = np.take(values, 0, axis=self.axis)
        return side if self.right_index is None else side[self.right_index]

    def write_left(self, values, new):
        idx = [slice(None)] * (values.ndim - 1)
        idx[self.axis] = -1
        self._write(values, tuple(idx), self.left_index, new)

    def write_right(self, values, new):
        idx = [slice(None)] * (values.ndim - 1)
        idx[self.axis] = 0
        self._write(values, tuple(idx), self.right_index, new)

    def _write(self, values, idx, line_index, new):
        view = values[idx]
        mask = self.merge_mask
        if line_index is None:
            if mask is None:
                view[...] = new
            else:
                view[mask] = new[mask]
        else:
            sel = line_index if mask is None else line_index[mask]
            src = new if mask is None else new[mask]
            view[sel] = src


@dataclass
class CornerPoint:
    """A point shared by four blocks (two crossing interfaces)."""

    members: list  # (block_id, (i, j)) pairs
    volumes: np.ndarray


@dataclass
class Domain:
    """A set of blocks plus the links that couple them.

    ``lattice`` maps block-lattice coordinates to block ids; blocks in one
    lattice column share their x layout and blocks in one row share y.
    """

    blocks: list
    links: list = field(default_factory=list)
    corners: list = field(default_factory=list)
    lattice: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.lattice is None:
            self.lattice = np.arange(len(self.blocks))
        self.validate()

    @property
    def ndim(self):
        return self.blocks[0].ndim

    @property
    def values(self):
        return [b.values for b in self.blocks]

    def validate(self):
        seen = {}
        for bid, block in enumerate(self.blocks):
            for axis in range(block.ndim):
                for side in (LOW, HIGH):
                    role = block.edge(axis, side)
                    if role.is_interface:
                        seen.setdefault(role.link_id, []).append((bid, axis, side))
        ids = {link.link_id for link in self.links}
        for link_id, owners in seen.items():
            if link_id not in ids:
                raise ContractViolation(f"edge refers to unknown link {link_id}")
            if len(owners) != 2:
                raise ContractViolation(
                    f"interface link {link_id} must join exactly two edges, has {len(owners)}")
        for link in self.links:
            if link.link_id not in seen:
                raise ContractViolation(f"link {link.link_id} not attached to any edge")
            self._check_coincident(link)

    def _check_coincident(self, link):
        left = self.blocks[link.left_block]
        right = self.blocks[link.right_block]
        xl = _coords(left, link.axis)[-1]
        xr = _coords(right, link.axis)[0]
        scale = max(1.0, abs(xl), abs(xr))
        if abs(xl - xr) > 1e-12 * scale:
            raise ContractViolation(
                f"link {link.link_id}: interface points do not coincide ({xl!r} vs {xr!r})")
        if left.ndim == 2:
            other = 1 - link.axis
            tl = _coords(left, other)
            tr = _coords(right, other)
            if link.left_index is not None:
                tl, tr = tl[link.left_index], tr[link.right_index]
            if tl.shape != tr.shape or not np.allclose(tl, tr, rtol=0, atol=1e-12 * scale):
                raise ContractViolation(
                    f"link {link.link_id}: points along the interface do not match")


def _coords(block, axis):
    if block.ndim == 1:
        return block.x
    return block.x if axis == 0 else block.y


def ghost_cells(values, role, side, model=None, direction=0, wrap_source=None):
    """Two ghost slices for one side of ``values`` along axis 0.

    The returned slices are ordered by increasing coordinate.  Periodic
    ghosts are taken from ``wrap_source`` (defaults to ``values``), i.e. the
    array on the far side of the periodic seam.
    """
    if role.kind == INTERFACE:
        raise ContractViolation("interface edges are never padded with ghosts")
    if role.kind == PERIODIC:
        src = values if wrap_source is None else wrap_source
        return src[-PAD:].copy() if side == LOW else src[:PAD].copy()
    if role.kind == REFLECTIVE:
        ghost = values[PAD - 1::-1].copy() if side == LOW else values[:-PAD - 1:-1].copy()
        k = None if model is None else model.normal_momentum_index(direction)
        if k is not None:
            ghost[..., k] *= -1.0
        return ghost
    raise ValueError(f"unknown edge role {role.kind!r}")


def fill_ghosts(values, low, high, model=None, direction=0, wrap_low=None, wrap_high=None):
    """Pad ``values`` with two ghost slices on both ends of axis 0."""
    return np.concatenate([
        ghost_cells(values, low, LOW, model, direction, wrap_low),
        values,
        ghost_cells(values, high, HIGH, model, direction, wrap_high),
    ])


def cell_volumes(block):
    """Per-cell volumes with interface copies weighted by their partial cell."""
    if block.ndim == 1:
        w = np.full(block.n, block.dx)
        if block.left.is_interface:
            w[0] *= 0.5
        if block.right.is_interface:
            w[-1] *= 0.5
        return w
    wx = np.full(block.nx, block.dx)
    wy = np.full(block.ny, block.dy)
    if block.edges["W"].is_interface:
        wx[0] *= 0.5
    if block.edges["E"].is_interface:
        wx[-1] *= 0.5
    if block.edges["S"].is_interface:
        wy[0] *= 0.5
    if block.edges["N"].is_interface:
        wy[-1] *= 0.5
    return np.outer(wx, wy)


def total_conserved(blocks, values=None):
    """Sum of value times cell volume per component over all blocks.

    A shared interface point contributes one half-cell from each side, so
    once synchronized it is counted once with weight (dx_L + dx_R)/2.
    """
    if values is None:
        values = [b.values for b in blocks]
    total = 0.0
    for block, v in zip(blocks, values):
        w = cell_volumes(block)
        total = total + np.tensordot(w, v, axes=w.ndim)
    return np.asarray(total)


def check_finite(values: Sequence[np.ndarray], **context):
    for bid, v in enumerate(values):
        if not np.all(np.isfinite(v)):
            bad = np.argwhere(~np.isfinite(v))[0]
            raise InadmissibleStateError(
                "non-finite value", location=(bid, *map(int, bad[:-1])), **context)


def assemble(domain, values=None):
    """Unique-point global field and coordinates from a tensor block lattice.

    The copy of each interface point held by the right (upper) block is
    dropped, so synchronized data yields the single-block grid.
    """
    if values is None:
        values = domain.values
    lattice = np.atleast_1d(domain.lattice)
    if domain.ndim == 1:
        parts, xs = [], []
        for bid in lattice:
            block = domain.blocks[bid]
            start = 1 if block.left.is_interface else 0
            parts.append(values[bid][start:])
            xs.append(block.x[start:])
        return (np.concatenate(xs),), np.concatenate(parts)
    columns, xs, ys = [], [], []
    for sx in range(lattice.shape[0]):
        col = []
        for sy in range(lattice.shape[1]):
            bid = lattice[sx, sy]
            block = domain.blocks[bid]
            i0 = 1 if block.edges["W"].is_interface else 0
            j0 = 1 if block.edges["S"].is_interface else 0
            col.append(values[bid][i0:, j0:])
            if sx == 0:
                ys.append(block.y[j0:])
            if sy == 0:
                xs.append(block.x[i0:])
        columns.append(np.concatenate(col, axis=1))
    return (np.concatenate(xs), np.concatenate(ys)), np.concatenate(columns, axis=0)

"""Boundary-point-only coupling of KT blocks.

Each block evolves its copy of the interface cells as a half cell with a
first-order (zero normal slope) update that only reads its own data.  The
copies are then replaced by their volume-weighted average; that average is
the only information which ever crosses a link.
"""
from __future__ import annotations

import struct
from collections import defaultdict, deque

import numpy as np

from .core import HIGH, LOW, PAD, ContractViolation, ghost_cells
from .scheme import kt_rhs_line

SYNC_TOL = 1e-12


def _flux_speed(model, direction, U):
    return model.flux_and_speed(direction, np.asarray(U, dtype=float))


def interface_rhs_left(v_interface, v_neighbor, slope_neighbor, dx_left, model, direction=0):
    """Rate of change of the left block's interface copy.

    The half cell [x_{I-1/2}, x_I] sees the KT face state of its neighbour
    on the left and the unreconstructed interface value on the right.
    """
    v_plus = np.asarray(v_interface, dtype=float)
    v_minus = np.asarray(v_neighbor, dtype=float) + 0.5 * dx_left * np.asarray(slope_neighbor)
    f_plus, s_plus = _flux_speed(model, direction, v_plus)
    f_minus, s_minus = _flux_speed(model, direction, v_minus)
    a = np.maximum(s_plus, s_minus)[..., None]
    g_plus = f_plus + a * v_plus
    g_minus = f_minus + a * v_minus
    return -(g_plus - g_minus) / dx_left


def interface_rhs_right(v_interface, v_neighbor, slope_neighbor, dx_right, model, direction=0):
    """Mirror of :func:`interface_rhs_left` for the right block's copy."""
    v_minus = np.asarray(v_interface, dtype=float)
    v_plus = np.asarray(v_neighbor, dtype=float) - 0.5 * dx_right * np.asarray(slope_neighbor)
    f_plus, s_plus = _flux_speed(model, direction, v_plus)
    f_minus, s_minus = _flux_speed(model, direction, v_minus)
    a = np.maximum(s_plus, s_minus)[..., None]
    g_plus = f_plus - a * v_plus
    g_minus = f_minus - a * v_minus
    return -(g_plus - g_minus) / dx_right


def merge_interface(v_left, v_right, dx_left, dx_right):
    return (dx_left * np.asarray(v_left) + dx_right * np.asarray(v_right)) / (dx_left + dx_right)


def corner_merge(quad_values, volumes):
    """Volume-weighted average of the four copies of a corner point."""
    q = np.asarray(quad_values, dtype=float)
    w = np.asarray(volumes, dtype=float)
    return np.tensordot(w, q, axes=1) / w.sum()


def padded_line(domain, values, bid, axis, model):
    """Block ``bid`` with axis ``axis`` moved first and ghosts on physical sides.

    Interface sides get edge copies; the zero-slope flag ensures they are
    never read.
    """
    block = domain.blocks[bid]
    line = np.moveaxis(values[bid], axis, 0)
    parts = []
    for side in (LOW, HIGH):
        role = block.edge(axis, side)
        if role.is_interface:
            edge = line[:1] if side == LOW else line[-1:]
            parts.append(np.repeat(edge, PAD, axis=0))
        else:
            wrap = None
            if role.partner is not None:
                wrap = np.moveaxis(values[role.partner], axis, 0)
            parts.append(ghost_cells(line, role, side, model, axis, wrap))
    return np.concatenate([parts[0], line, parts[1]]), line


def check_synchronized(domain, values, tol=SYNC_TOL):
    for link in domain.links:
        vl = link.left_slice(values[link.left_block])
        vr = link.right_slice(values[link.right_block])
        gap = np.max(np.abs(vl - vr))
        scale = max(1.0, float(np.max(np.abs(vl))))
        if gap > tol * scale:
            raise ContractViolation(
                f"link {link.link_id} unsynchronized: |v_L - v_R| = {gap:.3e}")


def multiblock_rhs(domain, model, theta=2.0, values=None, check_sync=True,
                   first_order=False):
    """dv/dt for every block; interface cells use the half-cell update."""
    if values is None:
        values = domain.values
    if check_sync:
        check_synchronized(domain, values)
    out = []
    for bid, block in enumerate(domain.blocks):
        rhs = np.zeros_like(values[bid])
        for axis in range(block.ndim):
            low = block.edge(axis, LOW)
            high = block.edge(axis, HIGH)
            dx = block.spacing[axis]
            padded, line = padded_line(domain, values, bid, axis, model)
            r, s = kt_rhs_line(padded, model, axis, dx, theta,
                               interface_flags=(low.is_interface, high.is_interface),
                               first_order=first_order, return_slopes=True)
            if high.is_interface:
                r[-1] = interface_rhs_left(line[-1], line[-2], s[-2], dx, model, axis)
            if low.is_interface:
                r[0] = interface_rhs_right(line[0], line[1], s[1], dx, model, axis)
            rhs += np.moveaxis(r, 0, axis)
        out.append(rhs)
    return out


class LinkChannel:
    """In-process message queue standing in for inter-process links.

    Every message is a packed header followed by the raw float64 interface
    values; bytes are tallied per link.
    """

    HEADER = struct.Struct("<iiBI")  # link_id, stage_index, side, n_values

    def __init__(self):
        self.queue = deque()
        self.bytes_by_link = defaultdict(int)
        self.messages_by_link = defaultdict(int)

    @classmethod
    def encode(cls, link_id, stage_index, side, values):
        payload = np.ascontiguousarray(values, dtype="<f8")
        return cls.HEADER.pack(link_id, stage_index, side, payload.size) + payload.tobytes()

    @classmethod
    def decode(cls, message, shape):
        link_id, stage_index, side, count = cls.HEADER.unpack_from(message)
        data = np.frombuffer(message, dtype="<f8", offset=cls.HEADER.size, count=count)
        return {"link_id": link_id, "stage_index": stage_index, "side": side,
                "values": data.reshape(shape)}

    def send(self, link_id, stage_index, side, values):
        msg = self.encode(link_id, stage_index, side, values)
        self.queue.append(msg)
        self.bytes_by_link[link_id] += len(msg)
        self.messages_by_link[link_id] += 1

    def receive(self, shape):
        return self.decode(self.queue.popleft(), shape)

    @property
    def total_bytes(self):
        return sum(self.bytes_by_link.values())

    def reset(self):
        self.queue.clear()
        self.bytes_by_link.clear()
        self.messages_by_link.clear()


def synchronize(domain, values=None, stage_index=0, channel=None):
    """Merge every interface and corner in place.

    With a channel, each side ships its interface copy as one message and
    computes the merge from its own copy and the received one.
    """
    if values is None:
        values = domain.values
    for link in domain.links:
        vl = link.left_slice(values[link.left_block])
        vr = link.right_slice(values[link.right_block])
        if channel is not None:
            channel.send(link.link_id, stage_index, 0, vl)
            channel.send(link.link_id, stage_index, 1, vr)
            from_left = channel.receive(vl.shape)["values"]
            from_right = channel.receive(vr.shape)["values"]
            merged_on_right = merge_interface(from_left, vr, link.dx_left, link.dx_right)
            merged_on_left = merge_interface(vl, from_right, link.dx_left, link.dx_right)
        else:
            merged_on_left = merged_on_right = merge_interface(
                vl, vr, link.dx_left, link.dx_right)
        link.write_left(values[link.left_block], merged_on_left)
        link.write_right(values[link.right_block], merged_on_right)
    for corner in domain.corners:
        quad = [values[bid][idx] for bid, idx in corner.members]
        merged = corner_merge(quad, corner.volumes)
        for bid, idx in corner.members:
            values[bid][idx] = merged
    return values


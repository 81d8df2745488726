import numpy as np
import pytest

from ddsat import wire
from ddsat.core import TrafficClass
from ddsat.nodes import (
    BaseNode, PrimaryActivity, PrimaryNode, SecondaryNode, SnState,
)
from ddsat.sensing import DetectionConfig

CFG = DetectionConfig(-60.0)
CHANNELS = (2, 3, 4)


def beacon(occupied=(), channels=CHANNELS):
    return wire.BeaconPacket(frozenset(occupied), tuple(channels))


def quiet_medium(node, ch, rng):
    return -90.0


# -- sync / beacon handling ---------------------------------------------------

def test_beacon_pick_among_free_slots(scripted_rng):
    sn = SecondaryNode(node_id=1)
    # free slots are [1, 3]; scripted draw takes index 1 of the free list
    sn.on_beacon(beacon(occupied={0, 2}), 4, scripted_rng([1]))
    assert sn.ddsat_slot == 3
    assert sn.state is SnState.DDSAT_RESERVED
    assert not sn.confirmed


def test_beacon_confirms_existing_reservation(scripted_rng):
    sn = SecondaryNode(node_id=1, ddsat_slot=0)
    sn.on_beacon(beacon(occupied={0}), 4, scripted_rng([3]))
    assert sn.ddsat_slot == 0
    assert sn.confirmed


def test_beacon_all_slots_taken_increments_pd(scripted_rng):
    sn = SecondaryNode(node_id=1)
    sn.on_beacon(beacon(occupied={0, 1, 2, 3}), 4, scripted_rng([]))
    assert sn.state is SnState.SYNC_WAIT
    assert sn.pd == 1


def test_beacon_unconfirmed_slot_is_redrawn(scripted_rng):
    # the held slot is absent from the bitmap: the earlier claim collided
    sn = SecondaryNode(node_id=1, ddsat_slot=2)
    sn.on_beacon(beacon(occupied={0}), 4, scripted_rng([0]))
    assert sn.ddsat_slot == 1  # first free slot
    assert not sn.confirmed


# -- ddsat transmission -------------------------------------------------------

def test_own_slot_packet_quiet_network():
    sn = SecondaryNode(node_id=1, ddsat_slot=0)
    packet = sn.on_own_ddsat_slot(CHANNELS, quiet_medium, CFG,
                                  np.random.default_rng(0))
    assert packet.empty_channels == frozenset(CHANNELS)


def test_own_slot_priority_field():
    sn = SecondaryNode(node_id=1, ddsat_slot=0,
                       traffic=TrafficClass.REAL_TIME, pd=2)
    packet = sn.on_own_ddsat_slot(CHANNELS, quiet_medium, CFG,
                                  np.random.default_rng(0))
    assert packet.priority_index == 12


def test_own_slot_occupied_bitmap():
    sn = SecondaryNode(node_id=1, ddsat_slot=1)
    packet = sn.on_own_ddsat_slot(CHANNELS, quiet_medium, CFG,
                                  np.random.default_rng(0))
    assert wire.encode_ddsat(packet, 4)[6] == 0x02


# -- end of ddsat state ---------------------------------------------------------

def ddsat_packet(sender, slot, pi=1, req=4, empty=(2, 3), pref=(2, 3)):
    return wire.DdsatPacket(
        sender=sender, empty_channels=frozenset(empty), requested_slots=req,
        priority_index=pi, occupied_ddsat_slots=frozenset({slot}),
        preferred_channels=pref)


def test_state_end_sole_node_served():
    sn = SecondaryNode(node_id=1, ddsat_slot=0, confirmed=True)
    sn.on_ddsat_state_end([ddsat_packet(1, 0)], beacon(occupied={0}),
                          CHANNELS, 4)
    assert sn.state is SnState.DATA_ALLOCATED
    assert len(sn.grant) == 4


def test_state_end_lowest_priority_unserved():
    packets = [ddsat_packet(1, 0, pi=5), ddsat_packet(2, 1, pi=3),
               ddsat_packet(3, 2, pi=2)]
    sn = SecondaryNode(node_id=3, ddsat_slot=2, confirmed=True)
    sn.on_ddsat_state_end(packets, beacon(occupied={0, 1, 2}), CHANNELS, 4)
    assert sn.grant == []
    assert sn.pd == 1
    assert sn.state is SnState.DDSAT_RESERVED


def test_state_end_unconfirmed_request_excluded():
    # slot 2 is not in the beacon bitmap: node 3 is still registering
    packets = [ddsat_packet(1, 0, pi=1), ddsat_packet(3, 2, pi=9)]
    sn = SecondaryNode(node_id=1, ddsat_slot=0, confirmed=True)
    sn.on_ddsat_state_end(packets, beacon(occupied={0}), CHANNELS, 4)
    assert sn.last_table.slots_of(3) == []
    assert len(sn.grant) == 4


def test_state_end_own_collision_leaves_pd():
    sn = SecondaryNode(node_id=2, ddsat_slot=1, pd=3)
    sn.on_ddsat_state_end([ddsat_packet(1, 0)], beacon(occupied={0, 1}),
                          CHANNELS, 4)
    assert sn.pd == 3  # own packet not delivered: no delay update


# -- data state -----------------------------------------------------------------

def test_data_slot_transmits_only_granted_cells():
    sn = SecondaryNode(node_id=1)
    sn.grant = [(2, 0), (2, 1)]
    assert sn.on_data_slot(0) is not None
    assert sn.on_data_slot(1) is not None
    assert sn.on_data_slot(2) is None
    assert sn.on_data_slot(3) is None


def test_data_slot_silent_without_grant():
    sn = SecondaryNode(node_id=1)
    assert all(sn.on_data_slot(s) is None for s in range(4))


# -- base node ------------------------------------------------------------------

def test_bn_registers_fresh_packet():
    bn = BaseNode(sensing_channels=CHANNELS)
    bn.on_ddsat_slot_result(1, ddsat_packet(3, 1), collided=False)
    assert bn.reservations[1] == (3, 0)


def test_bn_frees_slot_after_two_collisions():
    bn = BaseNode(sensing_channels=CHANNELS)
    bn.on_ddsat_slot_result(1, ddsat_packet(3, 1), collided=False)
    bn.on_ddsat_slot_result(1, None, collided=True)
    assert 1 in bn.reservations
    bn.on_ddsat_slot_result(1, None, collided=True)
    assert 1 not in bn.reservations


def test_bn_lease_counter_resets_on_packet():
    bn = BaseNode(sensing_channels=CHANNELS)
    bn.on_ddsat_slot_result(0, ddsat_packet(5, 0), collided=False)
    bn.on_ddsat_slot_result(0, None, collided=False)  # one silent frame
    bn.on_ddsat_slot_result(0, ddsat_packet(5, 0), collided=False)
    assert bn.reservations[0] == (5, 0)


def test_bn_beacon_bitmap():
    bn = BaseNode(sensing_channels=CHANNELS)
    bn.reservations = {0: (7, 0), 2: (9, 0)}
    b = bn.make_beacon()
    assert b.occupied_ddsat_slots == frozenset({0, 2})
    assert b.sensing_channels == CHANNELS
    assert wire.encode_beacon(b, 4)[1] == 0x05


def test_bn_empty_beacon():
    bn = BaseNode(sensing_channels=CHANNELS)
    assert wire.encode_beacon(bn.make_beacon(), 4)[1] == 0x00


# -- primary node ------------------------------------------------------------------

def test_pn_always_on():
    pn = PrimaryNode(channel=4)
    rng = np.random.default_rng(0)
    assert all(pn.active(f, rng) for f in range(20))


def test_pn_bernoulli_zero():
    pn = PrimaryNode(channel=4, activity=PrimaryActivity.BERNOULLI, p_on=0.0)
    rng = np.random.default_rng(0)
    assert not any(pn.active(f, rng) for f in range(100))


def test_pn_bernoulli_half_long_run():
    pn = PrimaryNode(channel=4, activity=PrimaryActivity.BERNOULLI, p_on=0.5)
    rng = np.random.default_rng(5)
    frames = 10_000
    fraction = sum(pn.active(f, rng) for f in range(frames)) / frames
    assert fraction == pytest.approx(0.5, abs=0.02)

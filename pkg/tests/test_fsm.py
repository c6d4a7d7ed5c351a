"""FSM recovery: state registers, static transitions, reachability."""

from covrl.corpus import load_design
from covrl.hdl.design import parse_design
from covrl.hdl.fsm import detect_fsms


def test_tap_descriptor_shape():
    entry = load_design("tap_fsm")
    fsms = detect_fsms(entry.ir)
    assert len(fsms) == 1
    desc = fsms[0]
    assert desc.state_register == "state"
    assert len(desc.states) == 16
    assert len(desc.transitions) == 32  # two arcs per state
    assert desc.reset_state == "TEST_LOGIC_RESET"


def test_tap_transitions_against_hand_model():
    # hand-enumerated arcs: (state, tms=1 target, tms=0 target)
    hand = {
        "TEST_LOGIC_RESET": ("TEST_LOGIC_RESET", "RUN_TEST_IDLE"),
        "RUN_TEST_IDLE": ("SELECT_DR_SCAN", "SELECT_IR_SCAN"),
        "SELECT_DR_SCAN": ("CAPTURE_DR", "RUN_TEST_IDLE"),
        "CAPTURE_DR": ("SHIFT_DR0", "SELECT_DR_SCAN"),
        "SHIFT_DR0": ("SHIFT_DR1", "CAPTURE_DR"),
        "SHIFT_DR1": ("SHIFT_DR2", "SHIFT_DR0"),
        "SHIFT_DR2": ("SHIFT_DR3", "SHIFT_DR1"),
        "SHIFT_DR3": ("UPDATE_DR", "SHIFT_DR2"),
        "UPDATE_DR": ("TEST_LOGIC_RESET", "SHIFT_DR3"),
        "SELECT_IR_SCAN": ("RUN_TEST_IDLE", "CAPTURE_IR"),
        "CAPTURE_IR": ("SELECT_IR_SCAN", "SHIFT_IR0"),
        "SHIFT_IR0": ("CAPTURE_IR", "SHIFT_IR1"),
        "SHIFT_IR1": ("SHIFT_IR0", "SHIFT_IR2"),
        "SHIFT_IR2": ("SHIFT_IR1", "SHIFT_IR3"),
        "SHIFT_IR3": ("SHIFT_IR2", "UPDATE_IR"),
        "UPDATE_IR": ("SHIFT_IR3", "UPDATE_IR"),
    }
    expected = set()
    for src, (on_one, on_zero) in hand.items():
        expected.add((src, on_one))
        expected.add((src, on_zero))
    desc = detect_fsms(load_design("tap_fsm").ir)[0]
    assert set(desc.transitions) == expected


def test_tap_all_states_reachable_by_bfs():
    desc = detect_fsms(load_design("tap_fsm").ir)[0]
    adjacency: dict[str, set[str]] = {}
    for a, b in desc.transitions:
        adjacency.setdefault(a, set()).add(b)
    seen = {desc.reset_state}
    frontier = [desc.reset_state]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    assert seen == set(desc.state_names)


def test_transitions_are_subset_of_state_pairs():
    for name in ("alu", "tap_fsm", "fifo_sync", "fir4"):
        for desc in detect_fsms(load_design(name).ir):
            names = set(desc.state_names)
            assert all(a in names and b in names for a, b in desc.transitions)


def test_alu_has_no_fsm():
    assert detect_fsms(load_design("alu").ir) == []


def test_counter_is_not_an_fsm():
    src = """
module c (input wire clk, output wire tick);
  reg [3:0] cnt;
  assign tick = cnt == 4'd0;
  always @(posedge clk) cnt <= cnt + 4'd1;
endmodule
"""
    assert detect_fsms(parse_design(src)) == []


def test_constant_register_without_case_is_not_an_fsm():
    src = """
module c (input wire clk, input wire go, output wire o);
  localparam A = 1'd0;
  localparam B = 1'd1;
  reg mode;
  assign o = mode;
  always @(posedge clk) begin
    if (go) mode <= B; else mode <= A;
  end
endmodule
"""
    assert detect_fsms(parse_design(src)) == []


def test_implicit_self_arc_when_arm_may_not_assign():
    src = """
module h (input wire clk, input wire go, output wire o);
  localparam IDLE = 1'd0;
  localparam RUN  = 1'd1;
  reg st;
  assign o = st;
  always @(posedge clk) begin
    case (st)
      IDLE: if (go) st <= RUN;
      RUN:  st <= IDLE;
    endcase
  end
endmodule
"""
    desc = detect_fsms(parse_design(src))[0]
    assert ("IDLE", "IDLE") in desc.transitions  # fall-through holds the value
    assert ("IDLE", "RUN") in desc.transitions
    assert ("RUN", "IDLE") in desc.transitions

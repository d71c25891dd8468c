"""
The in-repo fixture corpus: hand-assembled contracts, the chain state each
one lives in, and the verdicts analyzing them must produce.

Function selectors and mapping slots are computed here rather than written
out, so the assembly sources stay readable.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Mapping, Tuple, Union

from eth_utils import function_signature_to_4byte_selector, keccak

from tracehound.bytecode import assemble
from tracehound.chainstate.snapshot import save_snapshot
from tracehound.chainstate.state import AccountState, BlockContext, ChainState
from tracehound.schemas.fixtures import FixtureExpectation, FixtureExpectations
from tracehound.words import word_to_bytes

EXPECTED_DIR = Path(__file__).parent / "expected"

ETHER = 10**18
FOUR_WEEKS_S = 4 * 7 * 24 * 3600

# One block for every fixture, so their accounts can share a corpus snapshot.
FIXTURE_BLOCK = BlockContext(
    number=4_499_451,
    timestamp=1_510_000_000,
    coinbase=0x00000000000000000000000000000000C0BA5E00,
    blockhash_seed=0x5EED,
)

DEPLOYER = 0x000000000000000000000000000000000DE910E5
FUNDER = 0x00000000000000000000000000000000F00DF00D
OWNER_A = 0x000000000000000000000000000000000A11CE00
OWNER_B = 0x00000000000000000000000000000000000B0B00
PAYEE = 0x0000000000000000000000000000000000BEEF00

PUSH_ADDRESS_MASK = "PUSH20 0x" + "ff" * 20
PUSH_BYTES20_MASK = "PUSH32 0x" + "ff" * 20 + "00" * 12


def selector(signature: str) -> str:
    return "0x" + function_signature_to_4byte_selector(signature).hex()


def mapping_slot(key: int, slot: int) -> int:
    """Storage slot of mapping[key] for a mapping declared at `slot`."""
    return int.from_bytes(keccak(word_to_bytes(key) + word_to_bytes(slot)), "big")


def fixture_address(name: str) -> int:
    return int.from_bytes(keccak(text=f"tracehound-fixture:{name}")[-20:], "big")


def _dispatch(*entries: Tuple[str, str]) -> str:
    """Selector switch leaving the selector on the stack; unknown selectors revert."""
    lines = ["PUSH 0 CALLDATALOAD PUSH 0xe0 SHR"]
    for signature, label in entries:
        lines.append(f"DUP1 PUSH4 {selector(signature)} EQ PUSH @{label} JUMPI")
    lines.append("PUSH 0 DUP1 REVERT")
    return "\n".join(lines)


def _mapping_key(slot: int, key: str = "CALLER") -> str:
    """Pushes keccak(key . slot); `key` is the code that pushes the key."""
    return f"{key} PUSH 0 MSTORE PUSH {slot} PUSH 0x20 MSTORE PUSH 0x40 PUSH 0 SHA3"


SEND_BALANCE_TO_CALLER = "PUSH 0 DUP1 DUP1 DUP1 ADDRESS BALANCE CALLER GAS CALL"


BOUNTY = f"""
{_dispatch(("payout(address[],uint256[])", "payout"))}
payout:
    ; heads must point where a canonical encoder puts them
    PUSH 4 CALLDATALOAD PUSH 0x40 EQ PUSH @recipients_ok JUMPI
    PUSH 0 DUP1 REVERT
recipients_ok:
    PUSH 4 CALLDATALOAD PUSH 4 ADD CALLDATALOAD         ; recipients.length
    DUP1 PUSH 0x20 MUL PUSH 0x60 ADD
    PUSH 0x24 CALLDATALOAD EQ PUSH @amounts_ok JUMPI
    PUSH 0 DUP1 REVERT
amounts_ok:
    PUSH 0x24 CALLDATALOAD PUSH 4 ADD CALLDATALOAD      ; amounts.length
    DUP2 EQ PUSH @lengths_ok JUMPI                      ; require(recipients.length == amounts.length)
    PUSH 0 DUP1 REVERT
lengths_ok:
    PUSH 0                                              ; i
loop:
    DUP2 DUP2 LT ISZERO PUSH @done JUMPI
    PUSH 0 DUP1 DUP1 DUP1
    DUP5 PUSH 0x20 MUL PUSH 0x24 ADD PUSH 0x24 CALLDATALOAD ADD CALLDATALOAD   ; amounts[i]
    DUP6 PUSH 0x20 MUL PUSH 0x24 ADD PUSH 4 CALLDATALOAD ADD CALLDATALOAD      ; recipients[i]
    {PUSH_ADDRESS_MASK} AND
    GAS CALL POP                                        ; recipients[i].send(amounts[i])
    PUSH 1 ADD PUSH @loop JUMP
done:
    STOP
"""

# Storage: 0 m_numOwners, 1 m_required, 2.. m_owners, 0x103 m_ownerIndex, 0x104 m_pending.
PARITY_WALLET = f"""
{_dispatch(("initMultiowned(address[],uint256)", "init"), ("kill(address)", "kill"))}
init:
    PUSH 0 SLOAD ISZERO PUSH @unowned JUMPI             ; if (m_numOwners > 0) throw
    PUSH 0 DUP1 REVERT
unowned:
    PUSH 4 CALLDATALOAD PUSH 0x40 EQ PUSH @owners_ok JUMPI
    PUSH 0 DUP1 REVERT
owners_ok:
    PUSH 4 CALLDATALOAD PUSH 4 ADD CALLDATALOAD         ; _owners.length
    PUSH 1 ADD PUSH 0 SSTORE                            ; m_numOwners = _owners.length + 1
    CALLER PUSH 3 SSTORE                                ; m_owners[1] = msg.sender
    PUSH 1 {_mapping_key(0x103)} SSTORE                 ; m_ownerIndex[msg.sender] = 1
    PUSH 0x24 CALLDATALOAD PUSH 1 SSTORE                ; m_required = _required
    STOP
kill:
    {_mapping_key(0x103)} SLOAD                         ; ownerIndex
    DUP1 PUSH @is_owner JUMPI
    STOP
is_owner:
    CALLDATASIZE PUSH 0 PUSH 0 CALLDATACOPY
    CALLDATASIZE PUSH 0 SHA3                            ; sha3(msg.data)
    PUSH 0 MSTORE PUSH 0x104 PUSH 0x20 MSTORE PUSH 0x40 PUSH 0 SHA3   ; pending
    DUP1 SLOAD PUSH @has_pending JUMPI
    PUSH 1 SLOAD DUP2 SSTORE                            ; pending.yetNeeded = m_required
    PUSH 0 DUP2 PUSH 1 ADD SSTORE                       ; pending.ownersDone = 0
has_pending:
    DUP2 PUSH 2 EXP                                     ; ownerIndexBit = 2**ownerIndex
    DUP1 DUP3 PUSH 1 ADD SLOAD AND PUSH @already JUMPI
    PUSH 2 DUP3 SLOAD LT PUSH @do_kill JUMPI           ; pending.yetNeeded <= 1
    PUSH 1 DUP3 SLOAD SUB DUP3 SSTORE                   ; pending.yetNeeded--
    DUP1 DUP3 PUSH 1 ADD SLOAD OR DUP3 PUSH 1 ADD SSTORE   ; pending.ownersDone |= ownerIndexBit
    STOP
already:
    STOP
do_kill:
    PUSH 4 CALLDATALOAD {PUSH_ADDRESS_MASK} AND SUICIDE  ; suicide(_to)
"""

# Storage: 0 owner, 1 isVerifiedMap.
ADDRESS_REG = f"""
{_dispatch(
    ("setOwner(address)", "set_owner"),
    ("verify(address)", "verify"),
    ("deverify(address)", "deverify"),
    ("hasPhysicalAddress(address)", "has_physical"),
)}
set_owner:
    CALLER PUSH 0 SLOAD EQ ISZERO PUSH @done JUMPI
    PUSH 4 CALLDATALOAD {PUSH_ADDRESS_MASK} AND PUSH 0 SSTORE
    STOP
verify:
    CALLER PUSH 0 SLOAD EQ ISZERO PUSH @done JUMPI
    PUSH 1 {_mapping_key(1, f"PUSH 4 CALLDATALOAD {PUSH_ADDRESS_MASK} AND")} SSTORE
    STOP
deverify:
    CALLER PUSH 0 SLOAD EQ ISZERO PUSH @done JUMPI
    PUSH 0 {_mapping_key(1, f"PUSH 4 CALLDATALOAD {PUSH_ADDRESS_MASK} AND")} SSTORE
    STOP
has_physical:
    {_mapping_key(1, f"PUSH 4 CALLDATALOAD {PUSH_ADDRESS_MASK} AND")} SLOAD
    PUSH 0 MSTORE PUSH 0x20 PUSH 0 RETURN
done:
    STOP
"""

# prev is stored as bytes20 but compared against the unmasked argument word.
TAP_NICKNAME = f"""
{_dispatch(("tap(bytes20)", "tap"))}
tap:
    PUSH 4 CALLDATALOAD
    DUP1 {PUSH_BYTES20_MASK} AND PUSH 0 SSTORE           ; prev = nickname
    PUSH 0 SLOAD EQ PUSH @same JUMPI                    ; if (prev != nickname)
    {SEND_BALANCE_TO_CALLER} POP                        ;   msg.sender.send(this.balance)
same:
    STOP
"""

# `mortal` was meant to be the constructor and stayed a public function.
MORTAL_THING = f"""
{_dispatch(("mortal()", "mortal"), ("kill()", "kill"), ("owner()", "owner"))}
mortal:
    CALLER PUSH 0 SSTORE
    STOP
kill:
    PUSH 0 SLOAD CALLER EQ PUSH @owner_kills JUMPI
    STOP
owner_kills:
    PUSH 0 SLOAD SUICIDE
owner:
    PUSH 0 SLOAD PUSH 0 MSTORE PUSH 0x20 PUSH 0 RETURN
"""

# Storage: 0 funder, 1 lastInvestmentTime, 2 records.
DIVIDEND = f"""
{_dispatch(("invest()", "invest"), ("withdraw()", "withdraw"))}
invest:
    {_mapping_key(2)}
    DUP1 SLOAD CALLVALUE ADD SWAP1 SSTORE               ; rec.balance += msg.value
    TIMESTAMP PUSH 1 SSTORE                             ; lastInvestmentTime = now
    STOP
withdraw:
    {_mapping_key(2)}                                   ; rec
    DUP1 SLOAD                                          ; balance = rec.balance
    DUP1 ISZERO PUSH @paid JUMPI
    PUSH 0 DUP3 SSTORE                                  ; rec.balance = 0
    PUSH 0 DUP1 DUP1 DUP1 DUP5 CALLER GAS CALL          ; msg.sender.transfer(balance)
    ISZERO PUSH @fail JUMPI
paid:
    PUSH {FOUR_WEEKS_S} PUSH 1 SLOAD TIMESTAMP SUB GT PUSH @expired JUMPI
    PUSH 0 MSTORE PUSH 0x20 PUSH 0 RETURN               ; return balance
expired:
    PUSH 0 SLOAD SUICIDE                                ; selfdestruct(funder)
fail:
    PUSH 0 DUP1 REVERT
"""

# Storage: 0 storedData, 1 storedAddress.
SIMPLE_STORAGE = f"""
{_dispatch(("set(uint256,address)", "set"), ("get()", "get"))}
set:
    PUSH 4 CALLDATALOAD PUSH 0 SSTORE
    PUSH 0x24 CALLDATALOAD {PUSH_ADDRESS_MASK} AND PUSH 1 SSTORE
    STOP
get:
    PUSH 0 SLOAD PUSH 0 MSTORE
    PUSH 1 SLOAD PUSH 0x20 MSTORE
    PUSH 0x40 PUSH 0 RETURN
"""

# Storage: 0 seed, 1 last, 2 nonces.
RNG_GUESS = f"""
{_dispatch(("Guess(uint256)", "guess"))}
guess:
    NUMBER BLOCKHASH PUSH 0 MSTORE
    CALLER PUSH 0x20 MSTORE PUSH 2 PUSH 0x40 MSTORE PUSH 0x40 PUSH 0x20 SHA3 SLOAD   ; nonces[msg.sender]
    PUSH 0x20 MSTORE PUSH 0x40 PUSH 0 SHA3              ; sha3(block.blockhash(block.number), nonce)
    PUSH 0x000b0007000500030001 MUL
    PUSH 0 SLOAD XOR                                    ; last = seed ^ ...
    DUP1 PUSH 1 SSTORE
    PUSH 4 CALLDATALOAD EQ PUSH @won JUMPI
    STOP
won:
    {SEND_BALANCE_TO_CALLER}
    ISZERO PUSH @fail JUMPI
    STOP
fail:
    PUSH 0 DUP1 REVERT
"""

# Storage: 0 required, 1 isOwner, 2 confirmations, 3 transactions, 4 confirmationCount.
MULTISIG_CONFIRM = f"""
    CALLDATASIZE ISZERO PUSH @deposit JUMPI
{_dispatch(("confirmTransaction(uint256)", "confirm"))}
deposit:
    STOP
confirm:
    {_mapping_key(1)} SLOAD PUSH @is_owner JUMPI        ; ownerExists(msg.sender)
    PUSH 0 DUP1 REVERT
is_owner:
    {_mapping_key(2, "PUSH 4 CALLDATALOAD")}
    PUSH 0x20 MSTORE CALLER PUSH 0 MSTORE PUSH 0x40 PUSH 0 SHA3   ; confirmations[tId][msg.sender]
    DUP1 SLOAD PUSH @counted JUMPI
    PUSH 1 SWAP1 SSTORE
    {_mapping_key(4, "PUSH 4 CALLDATALOAD")}
    DUP1 SLOAD PUSH 1 ADD SWAP1 SSTORE                  ; confirmationCount[tId]++
    PUSH @execute JUMP
counted:
    POP
execute:
    PUSH 0 SLOAD {_mapping_key(4, "PUSH 4 CALLDATALOAD")} SLOAD
    LT PUSH @pending JUMPI                              ; isConfirmed(tId)
    {_mapping_key(3, "PUSH 4 CALLDATALOAD")}            ; tx = transactions[tId]
    PUSH 1 DUP2 PUSH 2 ADD SSTORE                       ; tx.executed = true
    PUSH 0 DUP1 DUP1 DUP1
    DUP5 PUSH 1 ADD SLOAD DUP6 SLOAD
    GAS CALL POP                                        ; tx.destination.call.value(tx.value)()
pending:
    STOP
"""

PAYABLE_GUARD = f"""
    CALLVALUE PUSH @reject JUMPI
{_dispatch(("ping()", "ping"))}
ping:
    PUSH 0 SLOAD PUSH 1 ADD PUSH 0 SSTORE
    STOP
reject:
    PUSH 0 DUP1 REVERT
"""

# Revisits the same configuration forever.
MEMO_LOOP = """
    PUSH 0 CALLDATALOAD PUSH @idle JUMPI
    STOP
idle:
    PUSH @idle JUMP
"""

# A counter on the stack makes every visit new.
SPIN_LOOP = """
    PUSH 0
spin:
    PUSH 1 ADD PUSH @spin JUMP
"""

STOP_ONLY = "STOP"


@dataclass(frozen=True)
class Fixture:
    name: str
    summary: str
    source: str
    balance: int = 0
    storage: Mapping[int, int] = field(default_factory=dict)

    @property
    def address(self) -> int:
        return fixture_address(self.name)

    @property
    def bytecode(self) -> bytes:
        return _assemble(self.source)

    def account(self) -> AccountState:
        return AccountState(self.balance, self.bytecode, dict(self.storage))

    def snapshot(self) -> ChainState:
        """A chain holding just this contract at its fixture address."""
        return ChainState({self.address: self.account()}, FIXTURE_BLOCK)

    def expectations(self) -> List[FixtureExpectation]:
        return load_expectations(self.name)


@lru_cache(maxsize=None)
def _assemble(source: str) -> bytes:
    return assemble(source)


_FIXTURES: Tuple[Fixture, ...] = (
    Fixture("bounty", "payout sends any amount to any recipient list", BOUNTY),
    Fixture(
        "parity_wallet",
        "uninitialized multi-owner wallet: initMultiowned then kill",
        PARITY_WALLET,
        balance=0,
    ),
    Fixture(
        "address_reg",
        "registry that accepts Ether and has no way to send it",
        ADDRESS_REG,
        balance=ETHER // 2,
        storage={0: DEPLOYER},
    ),
    Fixture("tap_nickname", "bytes20 masking makes prev != nickname reachable", TAP_NICKNAME, balance=ETHER // 10),
    Fixture(
        "mortal_thing",
        "public `mortal` lets anyone become owner and kill",
        MORTAL_THING,
        balance=ETHER // 5,
        storage={0: DEPLOYER},
    ),
    Fixture(
        "dividend",
        "withdraw self-destructs four weeks after the last investment",
        DIVIDEND,
        balance=4 * ETHER,
        storage={0: FUNDER, 1: FIXTURE_BLOCK.timestamp - 7 * 24 * 3600},
    ),
    Fixture("simple_storage", "setter/getter contract that locks Ether", SIMPLE_STORAGE, balance=ETHER),
    Fixture(
        "rng_guess",
        "guessing game keyed on blockhash; the symbolic guess does not replay",
        RNG_GUESS,
        balance=2 * ETHER,
        storage={0: 0x1F2E3D4C5B6A7988},
    ),
    Fixture(
        "multisig_confirm",
        "multisig release needs two distinct owners",
        MULTISIG_CONFIRM,
        balance=3 * ETHER,
        storage={
            0: 2,
            mapping_slot(OWNER_A, 1): 1,
            mapping_slot(OWNER_B, 1): 1,
            mapping_slot(0, 3): PAYEE,
            mapping_slot(0, 3) + 1: ETHER,
        },
    ),
    Fixture("payable_guard", "rejects any message carrying value", PAYABLE_GUARD),
    Fixture("memo_loop", "idle loop over an unchanged configuration", MEMO_LOOP),
    Fixture("spin_loop", "unbounded counter loop", SPIN_LOOP),
    Fixture("stop_only", "a single STOP", STOP_ONLY),
)

FIXTURES: Dict[str, Fixture] = {f.name: f for f in _FIXTURES}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None


def load_expectations(name: str) -> List[FixtureExpectation]:
    path = EXPECTED_DIR / f"{name}.json"
    if not path.is_file():
        return []
    return FixtureExpectations.validate_json(path.read_text(encoding="utf-8"))


def corpus_snapshot() -> ChainState:
    """Every fixture account in one chain state."""
    return ChainState({f.address: f.account() for f in _FIXTURES}, FIXTURE_BLOCK)


def export_fixtures(directory: Union[str, Path]) -> List[Path]:
    """
    Write <name>.hex, <name>.asm, <name>.snapshot.json and <name>.expected.json
    for each fixture, plus snapshot.json holding all of them.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    for f in _FIXTURES:
        hex_path = out / f"{f.name}.hex"
        hex_path.write_text(f.bytecode.hex() + "\n", encoding="utf-8")
        asm_path = out / f"{f.name}.asm"
        asm_path.write_text(f.source.strip() + "\n", encoding="utf-8")
        expected_path = out / f"{f.name}.expected.json"
        expected = [e.model_dump(mode="json", exclude_none=True) for e in f.expectations()]
        expected_path.write_text(json.dumps(expected, indent=2) + "\n", encoding="utf-8")
        written += [hex_path, asm_path, save_snapshot(f.snapshot(), out / f"{f.name}.snapshot.json"), expected_path]
    written.append(save_snapshot(corpus_snapshot(), out / "snapshot.json"))
    return written

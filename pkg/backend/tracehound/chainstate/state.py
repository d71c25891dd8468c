"""
In-memory blockchain state: accounts, balances, code, storage and the
current block. This is the sandbox both the symbolic engine (as its start
state) and the validator (as a private fork) work against.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Tuple

from eth_utils import is_hex_address, keccak, to_normalized_address

from tracehound.words import ADDRESS_MASK, UINT256_MASK, word_to_bytes

Address = int

BLOCKHASH_WINDOW = 256


def format_address(address: Address) -> str:
    return f"0x{address & ADDRESS_MASK:040x}"


def parse_address(text: str) -> Address:
    if not isinstance(text, str) or not is_hex_address(text):
        raise ValueError(f"not a 20-byte hex address: {text!r}")
    return int(to_normalized_address(text), 16)


@dataclass
class AccountState:
    balance: int = 0
    code: Optional[bytes] = None
    storage: Dict[int, int] = field(default_factory=dict)

    @property
    def has_code(self) -> bool:
        return bool(self.code)

    def load(self, key: int) -> int:
        return self.storage.get(key, 0)

    def store(self, key: int, value: int) -> None:
        if value:
            self.storage[key] = value & UINT256_MASK
        else:
            self.storage.pop(key, None)

    def copy(self) -> "AccountState":
        return AccountState(self.balance, self.code, dict(self.storage))

    def storage_image(self) -> List[int]:
        """Every concrete value present in storage (keys excluded)."""
        return sorted(set(self.storage.values()))


@dataclass(frozen=True)
class BlockContext:
    number: int = 0
    timestamp: int = 0
    coinbase: Address = 0
    blockhash_seed: int = 0

    def advance(self, blocks: int = 1, interval_s: int = 15) -> "BlockContext":
        return replace(self, number=self.number + blocks, timestamp=self.timestamp + blocks * interval_s)

    def at(self, number: int, timestamp: int) -> "BlockContext":
        return replace(self, number=number, timestamp=timestamp)


def blockhash(block: BlockContext, n: int) -> int:
    """Deterministic stand-in for BLOCKHASH: Keccak-256(seed || n) inside the lookback window."""
    if not (block.number - BLOCKHASH_WINDOW <= n < block.number):
        return 0
    return int.from_bytes(keccak(word_to_bytes(block.blockhash_seed) + word_to_bytes(n)), "big")


@dataclass(frozen=True)
class Message:
    sender: Address
    value: int
    data: bytes
    recipient: Address

    def to_dict(self) -> Dict[str, str]:
        return {
            "sender": format_address(self.sender),
            "recipient": format_address(self.recipient),
            "value": hex(self.value),
            "data": "0x" + self.data.hex(),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, str]) -> "Message":
        data = d.get("data") or "0x"
        return cls(
            sender=parse_address(d["sender"]),
            value=int(d.get("value") or "0x0", 16),
            data=bytes.fromhex(data[2:] if data.startswith("0x") else data),
            recipient=parse_address(d["recipient"]),
        )


@dataclass
class ChainState:
    accounts: Dict[Address, AccountState] = field(default_factory=dict)
    block: BlockContext = field(default_factory=BlockContext)

    def get(self, address: Address) -> Optional[AccountState]:
        return self.accounts.get(address)

    def account(self, address: Address) -> AccountState:
        """Account at address, created empty on first touch."""
        acct = self.accounts.get(address)
        if acct is None:
            acct = AccountState()
            self.accounts[address] = acct
        return acct

    def balance(self, address: Address) -> int:
        acct = self.accounts.get(address)
        return acct.balance if acct else 0

    def code(self, address: Address) -> bytes:
        acct = self.accounts.get(address)
        if acct is None:
            return b""
        return acct.code or b""

    def is_contract(self, address: Address) -> bool:
        acct = self.accounts.get(address)
        return acct is not None and acct.has_code

    def transfer(self, sender: Address, recipient: Address, value: int) -> None:
        if value == 0:
            return
        src = self.account(sender)
        if src.balance < value:
            raise ValueError("insufficient balance")
        src.balance -= value
        self.account(recipient).balance += value

    def mint(self, address: Address, value: int) -> None:
        """Harness funding; the only way balance enters a sandbox."""
        self.account(address).balance += value

    def items(self) -> Iterator[Tuple[Address, AccountState]]:
        for address in sorted(self.accounts):
            yield address, self.accounts[address]


def fork(s: ChainState) -> ChainState:
    """Independent copy: mutations to the result never reach s."""
    return ChainState({a: acct.copy() for a, acct in s.accounts.items()}, s.block)


def with_account(s: ChainState, address: Address, account: AccountState) -> ChainState:
    forked = fork(s)
    forked.accounts[address] = account.copy()
    return forked


def scan_posthumous(s: ChainState) -> List[Address]:
    """Codeless accounts that still hold Ether, ascending."""
    return [a for a, acct in s.items() if not acct.code and acct.balance > 0]


def total_balance(s: ChainState) -> int:
    return sum(acct.balance for acct in s.accounts.values())

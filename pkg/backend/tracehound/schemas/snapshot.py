"""Chain snapshot file schema."""

import re
from typing import Dict, Optional

from pydantic import BaseModel, Field, field_validator

HEX20_PATTERN = r"^0x[0-9a-fA-F]{40}$"
HEX32_PATTERN = r"^0x[0-9a-fA-F]{1,64}$"
HEX_QUANTITY_PATTERN = r"^0x[0-9a-fA-F]+$"
HEX_BYTES_PATTERN = r"^0x([0-9a-fA-F]{2})*$"
STORAGE_WORD_PATTERN = r"^0x[0-9a-f]{1,64}$"

_U64 = 1 << 64


class BlockSchema(BaseModel):
    """Block parameters the sandbox starts from."""

    number: int = Field(..., ge=0, lt=_U64, description="Block height")
    timestamp: int = Field(..., ge=0, lt=_U64, description="Unix timestamp in seconds")
    coinbase: str = Field(..., pattern=HEX20_PATTERN, description="Miner address")
    blockhashSeed: str = Field(..., pattern=HEX32_PATTERN, description="Seed for the deterministic BLOCKHASH digest")

    class Config:
        extra = "forbid"


class AccountSchema(BaseModel):
    """One account entry."""

    balance: str = Field(..., pattern=HEX_QUANTITY_PATTERN, description="Balance in Wei, hex quantity")
    code: Optional[str] = Field(None, pattern=HEX_BYTES_PATTERN, description="Runtime bytecode; absent for accounts without code")
    storage: Optional[Dict[str, str]] = Field(None, description="Storage slots, lowercase hex key -> lowercase hex value")

    class Config:
        extra = "forbid"

    @field_validator("balance")
    @classmethod
    def _balance_fits(cls, v: str) -> str:
        if int(v, 16) >= 1 << 256:
            raise ValueError("balance exceeds 256 bits")
        return v

    @field_validator("storage")
    @classmethod
    def _storage_words(cls, v: Optional[Dict[str, str]]) -> Optional[Dict[str, str]]:
        if v is None:
            return v
        word = re.compile(STORAGE_WORD_PATTERN)
        slots: Dict[int, str] = {}
        for key, value in v.items():
            if not word.match(key) or not word.match(value):
                raise ValueError(f"storage entry {key!r}: {value!r} is not a lowercase 32-byte hex word")
            slot = int(key, 16)
            if slot in slots:
                raise ValueError(f"storage keys {slots[slot]!r} and {key!r} name the same slot")
            slots[slot] = key
        return v


class SnapshotSchema(BaseModel):
    """Top-level snapshot document."""

    block: BlockSchema
    accounts: Dict[str, AccountSchema] = Field(default_factory=dict)

    class Config:
        extra = "forbid"

    @field_validator("accounts")
    @classmethod
    def _addresses(cls, v: Dict[str, AccountSchema]) -> Dict[str, AccountSchema]:
        addr = re.compile(HEX20_PATTERN)
        for key in v:
            if not addr.match(key):
                raise ValueError(f"account key {key!r} is not a 20-byte hex address")
        return v

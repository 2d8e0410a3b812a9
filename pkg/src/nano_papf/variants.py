# -*- coding: utf-8 -*-
"""
方法变体 - 四种规划方法及其开关

TAPF   传统人工势场，不加任何约束
AL     只加转角限幅
AL_VA  转角限幅 + 速度调节
PAPF   转角限幅 + 速度调节 + 预测势场
"""

from enum import Enum

from .geom import InvalidInputError


class MethodVariant(str, Enum):
    """规划方法变体

    取值就是 CLI 和文件里使用的小写名字，例如 ``MethodVariant("al_va")``。

    Example:
        >>> MethodVariant.parse("PAPF").predictive
        True
        >>> MethodVariant.AL.velocity_adjust
        False
    """
    TAPF = "tapf"
    AL = "al"
    AL_VA = "al_va"
    PAPF = "papf"

    @property
    def angle_limit(self) -> bool:
        return self is not MethodVariant.TAPF

    @property
    def velocity_adjust(self) -> bool:
        return self in (MethodVariant.AL_VA, MethodVariant.PAPF)

    @property
    def predictive(self) -> bool:
        return self is MethodVariant.PAPF

    @property
    def label(self) -> str:
        """报表中使用的显示名"""
        return {"tapf": "TAPF", "al": "AL", "al_va": "AL+VA", "papf": "PAPF"}[self.value]

    @classmethod
    def parse(cls, name: "str | MethodVariant") -> "MethodVariant":
        """不区分大小写地解析变体名，"al+va" 也被接受"""
        if isinstance(name, MethodVariant):
            return name
        key = str(name).strip().lower().replace("+", "_").replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(v.value for v in cls)
            raise InvalidInputError(f"variant 未知: {name!r}（可选: {choices}）") from None

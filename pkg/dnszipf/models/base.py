from pydantic import BaseModel, ConfigDict


class FrozenModel(BaseModel):
    """
    Base for immutable domain values.
    Instances are hashable and compare by value.
    """

    model_config = ConfigDict(frozen=True)

"""Exception types raised across the package."""


class ConfigError(ValueError):
    """Invalid sampler or experiment configuration."""


class DomainError(ValueError):
    """A numerical check was asked to work outside its valid domain."""


class UnsupportedObjectiveError(TypeError):
    """The objective does not have the structure a closed-form check needs."""


class DivergenceError(RuntimeError):
    """A chain produced a non-finite position or objective value.

    ``records`` holds the trajectory recorded before the failure when the error
    is raised from :func:`adavol.samplers.run`.
    """

    def __init__(self, chain: int, iteration: int, what: str = "position"):
        super().__init__(f"chain {chain} produced a non-finite {what} at iteration {iteration}")
        self.chain = chain
        self.iteration = iteration
        self.records = []
        self.ensemble = None

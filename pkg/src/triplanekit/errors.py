"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage problems exit 1, DataError
(and subclasses) exit 2, MissingPrerequisiteError exit 3.
"""


class TriplaneKitError(Exception):
    """Base class for all toolkit errors."""


class DataError(TriplaneKitError):
    """Bad input data: unparsable meshes, shape mismatches, invalid ranges."""


class MeshFormatError(DataError):
    """A mesh file could not be parsed into a triangle mesh."""


class EmptyMeshError(DataError):
    """Isosurface extraction found no sign change anywhere in the field."""


class CheckpointMismatchError(DataError):
    """Checkpoint config hash or parameter shapes do not match the live config."""


class TrainingDivergedError(DataError):
    """A training loss became non-finite; carries the offending step's components."""


class MissingPrerequisiteError(TriplaneKitError):
    """A pipeline stage was invoked before the stages it depends on."""

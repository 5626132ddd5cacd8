# -*- coding: utf-8 -*-

import copy
import logging

NTUCORE_VERSION = "0.1.0"


logger = logging.getLogger('ntucore')


class NtuObject(object):
    """ Base class for an immutable ntucore model object """

    # Model type name (used in serialized output)
    MODEL_TYPE = None

    # Fields which must be present for the object to be considered valid
    REQUIRED_FIELDS = ()

    def __init__(self, data=None):
        """ Instantiate this object.

        Args:
            data - dict representation of the object
        """

        if data is None:
            data = {}

        if type(data) is not dict:
            raise TypeError(f"Data provided to {self.__class__.__name__} must be a dict object")

        object.__setattr__(self, '_data', data)

    @classmethod
    def getModelType(cls):
        """Return the model type for this class."""
        return cls.MODEL_TYPE or cls.__name__.lower()

    def __str__(self):
        """
        Simple human-readable printing.
        Can override in subclass
        """

        return f"{self.getModelType()}<{', '.join(self.keys())}>"

    def is_valid(self):
        """
        Test if this object is 'valid'.

        To be considered 'valid':

        - Must have a non-null data structure
        - Every required field must be present
        """

        data = getattr(self, '_data', None)

        if data is None:
            return False

        for field in self.REQUIRED_FIELDS:
            if field not in data:
                return False

        return True

    def toDict(self):
        """Return a deep copy of the underlying data."""
        return copy.deepcopy(self._data)

    def keys(self):
        return self._data.keys()

    def __contains__(self, name):
        return name in self._data

    def __getattr__(self, name):

        data = object.__getattribute__(self, '_data')

        if name in data.keys():
            return data[name]
        else:
            return super().__getattribute__(name)

    def __setattr__(self, name, value):
        # Private caches may be written, model data may not
        if name.startswith('_'):
            object.__setattr__(self, name, value)
        else:
            raise AttributeError(f"{self.__class__.__name__} is immutable (cannot set '{name}')")

    def __getitem__(self, name):
        if name in self._data.keys():
            return self._data[name]
        else:
            raise KeyError(f"Key '{name}' does not exist in dataset")

    def __setitem__(self, name, value):
        raise TypeError(f"{self.__class__.__name__} is immutable (cannot set '{name}')")


class MetadataMixin:
    """Mixin class for models which support a 'metadata' attribute.

    - The 'metadata' is not used by any solver logic
    - Instead it records provenance (instance family, parameters, gadget roles)
    - Internally it is stored in the 'metadata' entry of the model data
    """

    def getMetadata(self):
        """Read model instance metadata"""
        return copy.deepcopy(self._data.get('metadata', {}))

    def withMetadata(self, data, overwrite=False):
        """Return a copy of this model with updated metadata.

        Arguments:
            data: The data to be written. Must be a dict object
            overwrite: If true, provided data replaces existing data. If false (default) data is merged with any existing data.
        """

        if type(data) is not dict:
            raise TypeError("Data provided to 'withMetadata' method must be a dict object")

        if overwrite:
            metadata = copy.deepcopy(data)
        else:
            metadata = self.getMetadata()
            metadata.update(copy.deepcopy(data))

        values = self.toDict()
        values['metadata'] = metadata

        return self.__class__.fromDict(values)

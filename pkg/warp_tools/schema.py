import inspect

from .errors import ScenarioError

_REQUIRED = object()

_TYPE_NAMES = {
    str: 'a string',
    int: 'an integer',
    float: 'a number',
    bool: 'a boolean',
    dict: 'a table',
    }

class Field:
    """
    The type of a section key. Indexing makes a list type: `text[...]` is a
    list of strings of any length, `number[2]` a pair of numbers.
    """

    def __init__(self, kinds, default=_REQUIRED):
        self._shape = ()
        self.kinds = kinds
        self.default = default

    def __getitem__(self, key):
        r = Field(self.kinds, self.default)
        r._shape = (key,) + self._shape
        return r

    def optional(self, default=None):
        r = Field(self.kinds, default)
        r._shape = self._shape
        return r

    @property
    def required(self):
        return self.default is _REQUIRED

    def describe(self):
        # integers are accepted as numbers
        desc = ' or '.join(_TYPE_NAMES[k] for k in self.kinds if not (k is int and float in self.kinds))
        for n in reversed(self._shape):
            desc = 'a list{} of ({})'.format('' if n is Ellipsis else ' of length {}'.format(n), desc)
        return desc

    def convert(self, value, location):
        return self._convert(value, self._shape, location)

    def _convert(self, value, shape, location):
        if shape:
            n = shape[0]
            if not isinstance(value, list) or (n is not Ellipsis and len(value) != n):
                raise ScenarioError('expected {}'.format(self.describe()), location)
            return [self._convert(v, shape[1:], location) for v in value]

        # TOML booleans are ints to isinstance
        if isinstance(value, bool) and bool not in self.kinds:
            raise ScenarioError('expected {}'.format(self.describe()), location)
        if not isinstance(value, self.kinds):
            raise ScenarioError('expected {}'.format(self.describe()), location)
        if float in self.kinds and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        return value

class SectionDescriptor:
    def __init__(self, annotations):
        self.annotations = annotations

    @property
    def names(self):
        return self.annotations.keys()

    @property
    def required(self):
        return [k for k, f in self.annotations.items() if f.required]

class SectionMeta(type):
    def __new__(cls, name, bases, namespace, no_section_members=False, **kwds):
        self = super().__new__(cls, name, bases, namespace, **kwds)

        if not no_section_members:
            annotations = {}
            for base in reversed(self.__mro__[1:]):
                if isinstance(base, SectionMeta) and hasattr(base, 'descriptor'):
                    annotations.update(base.descriptor.annotations)
            annotations.update(inspect.get_annotations(self))
            self.descriptor = SectionDescriptor(annotations)
            for key, field in self.descriptor.annotations.items():
                setattr(self, key, None if field.required else field.default)

        return self

class Section(metaclass=SectionMeta, no_section_members=True):
    """
    A scenario table with a fixed set of typed keys, declared as class
    annotations of `Field` values.
    """

    descriptor: SectionDescriptor

    def __init__(self, **kw):
        annots = self.descriptor.annotations
        for k, v in kw.items():
            if k not in annots:
                raise TypeError('{}() got an unexpected keyword argument {!r}'.format(type(self).__name__, k))
            setattr(self, k, v)

    def __repr__(self):
        return '{}({})'.format(type(self).__name__, ', '.join('{}={!r}'.format(k, getattr(self, k)) for k in self.descriptor.names))

    @classmethod
    def from_table(cls, table, location):
        if not isinstance(table, dict):
            raise ScenarioError('expected a table', location)

        annots = cls.descriptor.annotations
        for k in table:
            if k not in annots:
                raise ScenarioError('unexpected key {!r}'.format(k), location)
        for k in cls.descriptor.required:
            if k not in table:
                raise ScenarioError('missing key {!r}'.format(k), location)

        r = cls()
        for k, v in table.items():
            setattr(r, k, annots[k].convert(v, '{} {}'.format(location, k)))
        return r

text = Field((str,))
integer = Field((int,))
number = Field((int, float))
boolean = Field((bool,))
table = Field((dict,))

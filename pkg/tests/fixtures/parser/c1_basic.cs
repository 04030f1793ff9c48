using System;
using System.Collections.Generic;
using static System.Math;
using IO = System.IO.Path;
global using System.Linq;

namespace Acme { class C1 {} }
